//! Flat key = value configuration with flag overrides.
//!
//! Keys are a closed set; an unknown key is a usage error so typos fail
//! fast instead of silently keeping a default.

use std::path::Path;

use cpmm_hedge_core::Spacing;

use crate::CliError;

/// Tunables shared by the subcommands. Resolution order: built-in
/// defaults, then the config file (`--config` flag or `CPMM_HEDGE_CONFIG`
/// env var), then command-line flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defaults {
    /// Strikes per side of the replication grid.
    pub grid_n: usize,
    /// Lower strike bound as a divisor of the anchor: k_min = m / kmin_factor.
    pub kmin_factor: f64,
    /// Upper strike bound as a multiple of the anchor: k_max = m * kmax_factor.
    pub kmax_factor: f64,
    /// Strike and sweep point placement.
    pub spacing: Spacing,
    /// Points in the replication error sweep.
    pub eval_n: usize,
    /// Points in emitted value curves.
    pub curve_n: usize,
    /// Points in the certification oracle grid.
    pub oracle_n: usize,
    /// Certification tolerance as a fraction of the capital.
    pub eps_factor: f64,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            grid_n: 500,
            kmin_factor: 50.0,
            kmax_factor: 50.0,
            spacing: Spacing::Geometric,
            eval_n: 201,
            curve_n: 201,
            oracle_n: 10_000,
            eps_factor: 1e-9,
        }
    }
}

pub fn parse_spacing(s: &str) -> Result<Spacing, String> {
    match s {
        "uniform" => Ok(Spacing::Uniform),
        "geometric" => Ok(Spacing::Geometric),
        other => Err(format!(
            "unknown spacing `{other}` (expected uniform|geometric)"
        )),
    }
}

impl Defaults {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!(
                    "config {}:{}: expected `key = value`, got `{raw}`",
                    path.display(),
                    idx + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: String| {
                CliError::Usage(format!("config {}:{}: {key}: {e}", path.display(), idx + 1))
            };
            match key {
                "grid_n" => cfg.grid_n = value.parse().map_err(|e| bad(format!("{e}")))?,
                "kmin_factor" => {
                    cfg.kmin_factor = value.parse().map_err(|e| bad(format!("{e}")))?
                }
                "kmax_factor" => {
                    cfg.kmax_factor = value.parse().map_err(|e| bad(format!("{e}")))?
                }
                "spacing" => cfg.spacing = parse_spacing(value).map_err(bad)?,
                "eval_n" => cfg.eval_n = value.parse().map_err(|e| bad(format!("{e}")))?,
                "curve_n" => cfg.curve_n = value.parse().map_err(|e| bad(format!("{e}")))?,
                "oracle_n" => cfg.oracle_n = value.parse().map_err(|e| bad(format!("{e}")))?,
                "eps_factor" => cfg.eps_factor = value.parse().map_err(|e| bad(format!("{e}")))?,
                other => {
                    return Err(CliError::Usage(format!(
                        "config {}:{}: unknown key `{other}`",
                        path.display(),
                        idx + 1
                    )))
                }
            }
        }
        Ok(cfg)
    }
}
