//! Command-line front end: pool-value replication, impermanent-loss
//! curves, strangle hedge verification and search, and brute-force payoff
//! certification.
//!
//! Exit codes are a stable contract: 0 success/certified, 1 I/O or data
//! failure, 2 usage error, 3 uncertified/infeasible.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};

use cpmm_hedge_core::chain::{parse_chain, ChainFormat};
use cpmm_hedge_core::oracle::certify_nonnegative;
use cpmm_hedge_core::replication::{build_portfolio, put_tail_value_bound, replication_error};
use cpmm_hedge_core::strangle::{combined_payoff, optimize_plan, verify_plan_with};
use cpmm_hedge_core::{
    Error as CoreError, GridSpec, HedgeContext, HedgePlan, PositionParams, Spacing, StrikeGrid,
};

mod config;
mod output;

use config::{parse_spacing, Defaults};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(CoreError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                CoreError::Domain(_) => 2,
                CoreError::Infeasible { .. } | CoreError::NoAdmissiblePair => 3,
                _ => 1,
            },
        }
    }
}

/// Inclusive price interval flag, written `LO:HI`.
#[derive(Debug, Clone, Copy)]
struct Band {
    lo: f64,
    hi: f64,
}

fn parse_band(s: &str) -> Result<Band, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad upper bound: {e}"))?;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(format!("band bounds must be finite, got {lo}:{hi}"));
    }
    Ok(Band { lo, hi })
}

fn parse_date(s: &str) -> Result<NaiveDate, String> {
    NaiveDate::from_str(s).map_err(|e| format!("expected YYYY-MM-DD: {e}"))
}

#[derive(Parser)]
#[command(
    name = "cpmm-hedge",
    version,
    about = "Constant-product pool valuation, static replication, and impermanent-loss hedging"
)]
struct Cli {
    /// Key = value config file; CPMM_HEDGE_CONFIG is the fallback path.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output path for the command's curve CSV (stdout when omitted).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Emit machine-readable JSON instead of aligned text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the bond + futures + options portfolio replicating the pool value.
    Replicate(ReplicateArgs),
    /// Emit the impermanent-loss / value curves as CSV.
    Il(IlArgs),
    /// Verify a strangle hedge or search a chain for the cheapest one.
    Hedge {
        #[command(subcommand)]
        action: HedgeAction,
    },
    /// Brute-force non-negativity sweep of a combined pool + strangle payoff.
    Certify(CertifyArgs),
}

#[derive(Args)]
struct ReplicateArgs {
    /// Pool invariant k.
    #[arg(long)]
    k: f64,
    /// Anchor price (the pool's spot at portfolio construction).
    #[arg(long)]
    m: f64,
    /// Strikes per side (default from config: grid_n).
    #[arg(long)]
    grid_n: Option<usize>,
    /// Lowest strike; defaults to m / kmin_factor.
    #[arg(long)]
    k_min: Option<f64>,
    /// Highest strike; defaults to m * kmax_factor.
    #[arg(long)]
    k_max: Option<f64>,
    /// Strike placement: uniform | geometric.
    #[arg(long, value_parser = parse_spacing)]
    spacing: Option<Spacing>,
    /// Error sweep band (default m/10 : 10m).
    #[arg(long, value_parser = parse_band)]
    eval_band: Option<Band>,
    /// Error sweep point count (default from config: eval_n).
    #[arg(long)]
    eval_n: Option<usize>,
    /// Emit the futures exposure as a call/put pair at the anchor in the
    /// legs CSV (for venues without a futures market).
    #[arg(long)]
    anchor_pair: bool,
    /// Legs CSV path.
    #[arg(long, default_value = "replication_legs.csv")]
    legs_out: PathBuf,
    /// Error curve CSV path.
    #[arg(long, default_value = "replication_error.csv")]
    error_out: PathBuf,
}

#[derive(Args)]
struct IlArgs {
    #[command(flatten)]
    position: PositionArgs,
    /// Price band LO:HI to sweep.
    #[arg(long, value_parser = parse_band)]
    band: Band,
    /// Row count (default from config: curve_n).
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct PositionArgs {
    /// Initial capital in quote currency.
    #[arg(long)]
    c: f64,
    /// Entry price.
    #[arg(long)]
    p0: f64,
}

#[derive(Args)]
struct ContextArgs {
    #[command(flatten)]
    position: PositionArgs,
    /// Total pool return over the hedge horizon (fraction of capital).
    #[arg(long)]
    rp: f64,
    /// Coverage interval P_I:P_S containing the entry price.
    #[arg(long, value_parser = parse_band)]
    band: Band,
}

#[derive(Args)]
struct PlanArgs {
    /// Put strike.
    #[arg(long)]
    kp: f64,
    /// Call strike.
    #[arg(long)]
    kc: f64,
    /// Put quantity.
    #[arg(long)]
    qp: f64,
    /// Call quantity.
    #[arg(long)]
    qc: f64,
    /// Put premium per unit (quote currency).
    #[arg(long)]
    dp: f64,
    /// Call premium per unit (quote currency).
    #[arg(long)]
    dc: f64,
}

#[derive(Args)]
struct OracleArgs {
    /// Certification grid points (default from config: oracle_n).
    #[arg(long)]
    oracle_n: Option<usize>,
    /// Absolute certification tolerance (default eps_factor * c).
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Subcommand)]
enum HedgeAction {
    /// Check a fully specified plan against the coverage inequalities and
    /// the grid oracle.
    Verify {
        #[command(flatten)]
        ctx: ContextArgs,
        #[command(flatten)]
        plan: PlanArgs,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Exhaustively search a chain snapshot for the cheapest certified plan.
    Optimize {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Chain snapshot file (.csv or .json).
        #[arg(long)]
        chain: PathBuf,
        /// Option expiry to hedge with; defaults to the chain's only expiry.
        #[arg(long, value_parser = parse_date)]
        expiry: Option<NaiveDate>,
        #[command(flatten)]
        oracle: OracleArgs,
    },
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    ctx: ContextArgs,
    #[command(flatten)]
    plan: PlanArgs,
    #[command(flatten)]
    oracle: OracleArgs,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let defaults = match cli.config.clone().or_else(env_config_path) {
        Some(path) => Defaults::load(&path)?,
        None => Defaults::default(),
    };
    match &cli.command {
        Command::Replicate(args) => cmd_replicate(args, &defaults, cli.json),
        Command::Il(args) => cmd_il(args, &defaults, cli.out.as_deref()),
        Command::Hedge { action } => match action {
            HedgeAction::Verify { ctx, plan, oracle } => {
                cmd_verify(ctx, plan, oracle, &defaults, cli.json, cli.out.as_deref())
            }
            HedgeAction::Optimize {
                ctx,
                chain,
                expiry,
                oracle,
            } => cmd_optimize(
                ctx,
                chain,
                *expiry,
                oracle,
                &defaults,
                cli.json,
                cli.out.as_deref(),
            ),
        },
        Command::Certify(args) => cmd_certify(args, &defaults, cli.json),
    }
}

fn env_config_path() -> Option<PathBuf> {
    std::env::var_os("CPMM_HEDGE_CONFIG").map(PathBuf::from)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn cmd_replicate(args: &ReplicateArgs, d: &Defaults, json: bool) -> Result<u8, CliError> {
    let k_min = args.k_min.unwrap_or(args.m / d.kmin_factor);
    let k_max = args.k_max.unwrap_or(args.m * d.kmax_factor);
    let grid = StrikeGrid::new(
        k_min,
        k_max,
        args.grid_n.unwrap_or(d.grid_n),
        args.spacing.unwrap_or(d.spacing),
    )?;
    let port = build_portfolio(args.k, args.m, &grid)?;
    let eval_band = args.eval_band.unwrap_or(Band {
        lo: args.m / 10.0,
        hi: 10.0 * args.m,
    });
    let eval = GridSpec::new(
        eval_band.lo,
        eval_band.hi,
        args.eval_n.unwrap_or(d.eval_n),
        grid.spacing,
    )?;
    let sweep = replication_error(args.k, args.m, &grid, &eval)?;
    let tail = put_tail_value_bound(args.k, grid.k_min)?;

    if json {
        let summary = serde_json::json!({
            "bond_notional": port.bond_notional,
            "futures_notional": port.futures_notional,
            "anchor": port.anchor,
            "n_put_legs": port.put_legs.len(),
            "n_call_legs": port.call_legs.len(),
            "tail_value_bound": tail,
            "max_rel_error": sweep.max_rel_error,
            "max_rel_error_price": sweep.argmax_price,
            "n_eval_points": sweep.points.len(),
            "n_out_of_band": sweep.n_out_of_band,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&summary).expect("serializable")
        );
    } else {
        println!("bond notional    {}", port.bond_notional);
        println!("futures notional {}", port.futures_notional);
        println!("anchor           {}", port.anchor);
        println!(
            "option legs      {} puts + {} calls on [{}, {}] ({})",
            port.put_legs.len(),
            port.call_legs.len(),
            grid.k_min,
            grid.k_max,
            match grid.spacing {
                Spacing::Uniform => "uniform",
                Spacing::Geometric => "geometric",
            }
        );
        println!("tail value bound {tail}");
        println!(
            "max rel error    {} at price {} ({} eval points, {} out of band)",
            sweep.max_rel_error,
            sweep.argmax_price,
            sweep.points.len(),
            sweep.n_out_of_band
        );
    }

    write_file(&args.legs_out, &output::legs_csv(&port, args.anchor_pair))?;
    write_file(&args.error_out, &output::error_curve_csv(&sweep))?;
    if !json {
        println!("wrote {}", args.legs_out.display());
        println!("wrote {}", args.error_out.display());
    }
    Ok(0)
}

fn cmd_il(args: &IlArgs, d: &Defaults, out: Option<&Path>) -> Result<u8, CliError> {
    if args.band.lo >= args.band.hi {
        return Err(CliError::Usage(format!(
            "--band must satisfy LO < HI, got {}:{}",
            args.band.lo, args.band.hi
        )));
    }
    let params = PositionParams::new(args.position.c, args.position.p0)?;
    // Clamp away the p -> 0 singularity instead of failing the whole curve.
    let lo = args.band.lo.max(1e-12 * args.position.p0);
    let spec = GridSpec::new(
        lo,
        args.band.hi,
        args.n.unwrap_or(d.curve_n),
        Spacing::Uniform,
    )?;
    let csv = output::il_curve_csv(&params, &spec.points());
    match out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn build_context(ctx: &ContextArgs) -> Result<HedgeContext, CliError> {
    let params = PositionParams::new(ctx.position.c, ctx.position.p0)?;
    Ok(HedgeContext::new(params, ctx.rp, ctx.band.lo, ctx.band.hi)?)
}

fn build_plan(plan: &PlanArgs) -> Result<HedgePlan, CliError> {
    Ok(HedgePlan::new(
        plan.kp, plan.kc, plan.qp, plan.qc, plan.dp, plan.dc,
    )?)
}

fn oracle_settings(oracle: &OracleArgs, d: &Defaults, capital: f64) -> (usize, f64) {
    (
        oracle.oracle_n.unwrap_or(d.oracle_n),
        oracle.eps.unwrap_or(d.eps_factor * capital),
    )
}

fn cmd_verify(
    ctx: &ContextArgs,
    plan: &PlanArgs,
    oracle: &OracleArgs,
    d: &Defaults,
    json: bool,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    let context = build_context(ctx)?;
    let plan = build_plan(plan)?;
    let (oracle_n, eps) = oracle_settings(oracle, d, context.params().capital());
    let report = verify_plan_with(&context, &plan, oracle_n, eps)?;

    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("serializable")
        );
    } else {
        print!("{}", output::report_text(&context, &plan, &report));
    }
    if let Some(path) = out {
        write_file(path, &output::payoff_curve_csv(&context, &plan, d.curve_n))?;
    }
    Ok(if report.certified() { 0 } else { 3 })
}

fn infer_format(path: &Path) -> Result<ChainFormat, CliError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => Ok(ChainFormat::Csv),
        Some(ext) if ext.eq_ignore_ascii_case("json") => Ok(ChainFormat::Json),
        _ => Err(CliError::Usage(format!(
            "cannot infer chain format from `{}` (expected .csv or .json)",
            path.display()
        ))),
    }
}

fn cmd_optimize(
    ctx: &ContextArgs,
    chain_path: &Path,
    expiry: Option<NaiveDate>,
    oracle: &OracleArgs,
    d: &Defaults,
    json: bool,
    out: Option<&Path>,
) -> Result<u8, CliError> {
    let context = build_context(ctx)?;
    let format = infer_format(chain_path)?;
    let text = std::fs::read_to_string(chain_path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", chain_path.display())))?;
    let chain = parse_chain(&text, format)?;

    let expiry = match expiry {
        Some(e) => e,
        None => {
            let expiries = chain.expiries();
            match expiries.as_slice() {
                [only] => *only,
                several => {
                    return Err(CliError::Usage(format!(
                        "chain quotes several expiries {several:?}; pick one with --expiry"
                    )))
                }
            }
        }
    };

    let plan = optimize_plan(&context, &chain, expiry)?;
    let (oracle_n, eps) = oracle_settings(oracle, d, context.params().capital());
    let report = verify_plan_with(&context, &plan, oracle_n, eps)?;

    if json {
        let doc = serde_json::json!({ "expiry": expiry, "plan": plan, "report": report });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("serializable")
        );
    } else {
        println!("expiry         {expiry}");
        print!("{}", output::report_text(&context, &plan, &report));
    }
    if let Some(path) = out {
        write_file(path, &output::payoff_curve_csv(&context, &plan, d.curve_n))?;
    }
    Ok(if report.certified() { 0 } else { 3 })
}

fn cmd_certify(args: &CertifyArgs, d: &Defaults, json: bool) -> Result<u8, CliError> {
    let context = build_context(&args.ctx)?;
    let plan = build_plan(&args.plan)?;
    let (oracle_n, eps) = oracle_settings(&args.oracle, d, context.params().capital());
    let spec = GridSpec::new(context.p_i(), context.p_s(), oracle_n, Spacing::Geometric)?;
    let cert = certify_nonnegative(
        |p| combined_payoff(&context, &plan, p),
        &spec,
        &[plan.k_p, plan.k_c],
        eps,
    )?;

    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&cert).expect("serializable")
        );
    } else {
        println!(
            "interval   [{}, {}]  grid {} points  tolerance {eps}",
            context.p_i(),
            context.p_s(),
            cert.n_points
        );
        println!("minimum    {} at price {}", cert.min, cert.argmin);
        println!("certified  {}", if cert.pass { "yes" } else { "no" });
    }
    Ok(if cert.pass { 0 } else { 3 })
}
