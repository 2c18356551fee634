//! Brute-force grid evaluation used to certify non-negativity claims.
//!
//! Every payoff handled by this crate is piecewise smooth with known
//! breakpoints, so an exhaustive grid that always contains the interval
//! endpoints and the caller's breakpoints is a sound minimum-finding
//! certificate at a stated tolerance.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Point-placement rule for a price grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Uniform,
    Geometric,
}

/// A price interval together with a sampling density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    /// `n >= 2` unless the interval is a single point, in which case any
    /// `n >= 1` collapses to that point.
    pub fn new(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Result<Self> {
        if !(lo > 0.0 && lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Domain(format!(
                "grid interval must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
            )));
        }
        if n == 0 || (n < 2 && lo < hi) {
            return Err(Error::Domain(format!(
                "grid needs at least 2 points on a non-degenerate interval, got n={n}"
            )));
        }
        Ok(Self { lo, hi, n, spacing })
    }

    /// Grid points in ascending order. Both endpoints are always present
    /// and exact.
    pub fn points(&self) -> Vec<f64> {
        if self.lo == self.hi {
            return vec![self.lo];
        }
        let last = self.n - 1;
        let mut pts = Vec::with_capacity(self.n);
        match self.spacing {
            Spacing::Uniform => {
                let step = (self.hi - self.lo) / last as f64;
                for i in 0..self.n {
                    pts.push(self.lo + step * i as f64);
                }
            }
            Spacing::Geometric => {
                let (la, lb) = (self.lo.ln(), self.hi.ln());
                for i in 0..self.n {
                    let t = i as f64 / last as f64;
                    pts.push((la + t * (lb - la)).exp());
                }
            }
        }
        pts[0] = self.lo;
        pts[last] = self.hi;
        pts
    }

    /// Grid points plus any caller-supplied breakpoints that fall inside
    /// the interval, sorted and deduplicated.
    pub fn points_with(&self, breakpoints: &[f64]) -> Vec<f64> {
        let mut pts = self.points();
        for &b in breakpoints {
            if b >= self.lo && b <= self.hi {
                pts.push(b);
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// Exact minimum of `f` over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMinimum {
    pub value: f64,
    /// Lowest price attaining the minimum (deterministic tie rule).
    pub price: f64,
    pub n_points: usize,
}

/// Evaluates `f` on the grid (endpoints and in-range breakpoints included)
/// and returns the minimum. A non-finite evaluation aborts the sweep with
/// the offending price attached.
pub fn grid_min<F>(f: F, spec: &GridSpec, breakpoints: &[f64]) -> Result<GridMinimum>
where
    F: Fn(f64) -> f64,
{
    let pts = spec.points_with(breakpoints);
    let mut best_value = f64::INFINITY;
    let mut best_price = pts[0];
    for &p in &pts {
        let v = f(p);
        if !v.is_finite() {
            return Err(Error::Evaluation { price: p });
        }
        if v < best_value {
            best_value = v;
            best_price = p;
        }
    }
    Ok(GridMinimum {
        value: best_value,
        price: best_price,
        n_points: pts.len(),
    })
}

/// Verdict of a non-negativity sweep; `min`/`argmin` double as the witness
/// when the check fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub pass: bool,
    pub min: f64,
    pub argmin: f64,
    pub n_points: usize,
}

/// Passes iff the grid minimum of `f` is at least `-eps`.
pub fn certify_nonnegative<F>(
    f: F,
    spec: &GridSpec,
    breakpoints: &[f64],
    eps: f64,
) -> Result<Certification>
where
    F: Fn(f64) -> f64,
{
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::Domain(format!("tolerance must be >= 0, got {eps}")));
    }
    let m = grid_min(f, spec, breakpoints)?;
    Ok(Certification {
        pass: m.value >= -eps,
        min: m.value,
        argmin: m.price,
        n_points: m.n_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_function_min_is_at_lo() {
        let spec = GridSpec::new(1.0, 10.0, 100, Spacing::Uniform).unwrap();
        let m = grid_min(|_| 7.0, &spec, &[]).unwrap();
        assert_eq!(m.value, 7.0);
        assert_eq!(m.price, 1.0);
        assert_eq!(m.n_points, 100);
    }

    #[test]
    fn endpoints_are_exact_for_both_spacings() {
        for spacing in [Spacing::Uniform, Spacing::Geometric] {
            let spec = GridSpec::new(0.3, 17.9, 1000, spacing).unwrap();
            let pts = spec.points();
            assert_eq!(pts[0], 0.3);
            assert_eq!(*pts.last().unwrap(), 17.9);
            assert!(pts.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn kink_minimum_found_only_through_breakpoint() {
        // V-shape with its vertex off the regular 11-point lattice.
        let kink = std::f64::consts::PI;
        let f = |p: f64| (p - kink).abs();
        let spec = GridSpec::new(1.0, 5.0, 11, Spacing::Uniform).unwrap();

        let without = grid_min(f, &spec, &[]).unwrap();
        assert!(without.value > 0.0);

        let with = grid_min(f, &spec, &[kink]).unwrap();
        assert_eq!(with.value, 0.0);
        assert_eq!(with.price, kink);
        assert_eq!(with.n_points, 12);
    }

    #[test]
    fn out_of_range_breakpoints_are_ignored() {
        let spec = GridSpec::new(1.0, 2.0, 5, Spacing::Uniform).unwrap();
        let pts = spec.points_with(&[0.5, 3.0]);
        assert_eq!(pts.len(), 5);
    }

    #[test]
    fn nested_refinement_never_raises_the_min() {
        // Uniform n and 2n-1 points on the same interval are nested.
        let f = |p: f64| (p * 7.3).sin() + 0.2 * p;
        let coarse = GridSpec::new(0.5, 9.0, 101, Spacing::Uniform).unwrap();
        let fine = GridSpec::new(0.5, 9.0, 201, Spacing::Uniform).unwrap();
        let mc = grid_min(f, &coarse, &[]).unwrap();
        let mf = grid_min(f, &fine, &[]).unwrap();
        assert!(mf.value <= mc.value);
    }

    #[test]
    fn deterministic_argmin_on_ties() {
        // Symmetric W with two global minima; the lower price wins.
        let f = |p: f64| (p - 2.0).abs().min((p - 4.0).abs());
        let spec = GridSpec::new(1.0, 5.0, 5, Spacing::Uniform).unwrap();
        let m = grid_min(f, &spec, &[]).unwrap();
        assert_eq!(m.value, 0.0);
        assert_eq!(m.price, 2.0);

        let again = grid_min(f, &spec, &[]).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn degenerate_interval_is_a_single_point() {
        let spec = GridSpec::new(2.0, 2.0, 1, Spacing::Geometric).unwrap();
        assert_eq!(spec.points(), vec![2.0]);
        let spec = GridSpec::new(2.0, 2.0, 10_000, Spacing::Uniform).unwrap();
        assert_eq!(spec.points(), vec![2.0]);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(GridSpec::new(0.0, 1.0, 10, Spacing::Uniform).is_err());
        assert!(GridSpec::new(-1.0, 1.0, 10, Spacing::Uniform).is_err());
        assert!(GridSpec::new(2.0, 1.0, 10, Spacing::Uniform).is_err());
        assert!(GridSpec::new(1.0, 2.0, 1, Spacing::Uniform).is_err());
        assert!(GridSpec::new(1.0, 2.0, 0, Spacing::Uniform).is_err());
    }

    #[test]
    fn evaluator_failure_carries_the_price() {
        let spec = GridSpec::new(1.0, 3.0, 3, Spacing::Uniform).unwrap();
        let err = grid_min(|p| if p == 2.0 { f64::NAN } else { p }, &spec, &[]).unwrap_err();
        assert_eq!(err, crate::Error::Evaluation { price: 2.0 });
    }

    #[test]
    fn il_minimum_over_a_symmetric_band_sits_at_the_upper_endpoint() {
        // Impermanent loss falls off in both directions from the entry
        // price, but the upside endpoint of [p0/4, 4 p0] is deeper:
        // il(6800) = -c/2 exactly.
        let params = crate::PositionParams::new(170_000.0, 1700.0).unwrap();
        let spec = GridSpec::new(425.0, 6800.0, 10_000, Spacing::Uniform).unwrap();
        let m = grid_min(|p| params.il(p).unwrap(), &spec, &[]).unwrap();
        assert_eq!(m.value, -85_000.0);
        assert_eq!(m.price, 6800.0);
    }

    #[test]
    fn certify_passes_plain_nonnegative_payoff() {
        let spec = GridSpec::new(100.0, 5000.0, 1000, Spacing::Geometric).unwrap();
        let c = certify_nonnegative(|p| (p - 1700.0).max(0.0), &spec, &[1700.0], 0.0).unwrap();
        assert!(c.pass);
        assert_eq!(c.min, 0.0);
    }

    #[test]
    fn certify_failure_returns_witness() {
        // f(p) = p - p0 dips negative near the lower endpoint.
        let spec = GridSpec::new(1000.0, 2600.0, 101, Spacing::Uniform).unwrap();
        let c = certify_nonnegative(|p| p - 1700.0, &spec, &[], 1e-9).unwrap();
        assert!(!c.pass);
        assert_eq!(c.argmin, 1000.0);
        assert_eq!(c.min, -700.0);
    }

    #[test]
    fn negative_eps_rejected() {
        let spec = GridSpec::new(1.0, 2.0, 2, Spacing::Uniform).unwrap();
        assert!(certify_nonnegative(|_| 0.0, &spec, &[], -1.0).is_err());
    }
}
