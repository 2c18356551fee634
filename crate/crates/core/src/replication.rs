//! Static replication of twice-differentiable payoffs with a bond, a
//! futures position, and a strip of out-of-the-money options.
//!
//! Any smooth payoff f admits the decomposition around an anchor price m
//!
//! ```text
//! f(P) = f(m) + f'(m) (P - m)
//!      + integral over K < m of f''(K) (K - P)+ dK
//!      + integral over K > m of f''(K) (P - K)+ dK
//! ```
//!
//! which this module discretizes with a midpoint rule on strike cells. For
//! the pool value f(P) = 2 sqrt(k P) the pieces have closed forms: bond
//! notional 2 sqrt(k m), futures notional sqrt(k/m), and strike density
//! f''(K) = -sqrt(k/K^3)/2, so the replication is short options at every
//! strike.

use crate::chain::{OptionChain, OptionKind};
use crate::oracle::{GridSpec, Spacing};
use crate::pool::pool_value;
use crate::{Error, Result};

/// Strike discretization: `n_per_side` cells below the anchor and the same
/// number above it, spanning `[k_min, k_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrikeGrid {
    pub k_min: f64,
    pub k_max: f64,
    pub n_per_side: usize,
    pub spacing: Spacing,
}

impl StrikeGrid {
    pub fn new(k_min: f64, k_max: f64, n_per_side: usize, spacing: Spacing) -> Result<Self> {
        if !(k_min > 0.0 && k_min.is_finite() && k_max.is_finite() && k_min < k_max) {
            return Err(Error::Domain(format!(
                "strike grid must satisfy 0 < k_min < k_max, got [{k_min}, {k_max}]"
            )));
        }
        if n_per_side == 0 {
            return Err(Error::Domain(
                "strike grid needs at least one strike per side".into(),
            ));
        }
        Ok(Self {
            k_min,
            k_max,
            n_per_side,
            spacing,
        })
    }
}

/// One option position: quadrature weight carrying the f''(K) dK mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionLeg {
    pub strike: f64,
    pub weight: f64,
}

/// Discrete bond + futures + options portfolio replicating a payoff
/// around `anchor`. Put legs sit strictly below the anchor, call legs
/// strictly above, both in ascending strike order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationPortfolio {
    pub bond_notional: f64,
    pub futures_notional: f64,
    pub anchor: f64,
    pub put_legs: Vec<OptionLeg>,
    pub call_legs: Vec<OptionLeg>,
}

impl ReplicationPortfolio {
    /// Generic decomposition of a payoff with value `value` and slope
    /// `slope` at the anchor and second derivative `curvature`. Each cell
    /// of the grid contributes one leg at its midpoint with weight
    /// `curvature(mid) * cell_width`.
    pub fn for_payoff<F>(
        anchor: f64,
        value: f64,
        slope: f64,
        curvature: F,
        grid: &StrikeGrid,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64,
    {
        if !(anchor > grid.k_min && anchor < grid.k_max) {
            return Err(Error::Domain(format!(
                "anchor {anchor} must lie strictly inside the strike grid [{}, {}]",
                grid.k_min, grid.k_max
            )));
        }
        let put_legs = side_legs(
            grid.k_min,
            anchor,
            grid.n_per_side,
            grid.spacing,
            &curvature,
        )?;
        let call_legs = side_legs(
            anchor,
            grid.k_max,
            grid.n_per_side,
            grid.spacing,
            &curvature,
        )?;
        Ok(Self {
            bond_notional: value,
            futures_notional: slope,
            anchor,
            put_legs,
            call_legs,
        })
    }

    /// Terminal payoff of the portfolio at price `p`.
    pub fn payoff(&self, p: f64) -> f64 {
        let mut v = self.bond_notional + self.futures_notional * (p - self.anchor);
        for leg in &self.put_legs {
            if leg.strike > p {
                v += leg.weight * (leg.strike - p);
            }
        }
        for leg in &self.call_legs {
            if leg.strike < p {
                v += leg.weight * (p - leg.strike);
            }
        }
        v
    }

    /// Present value of the portfolio from market prices: the bond leg is
    /// discounted by `bond_price` and the futures exposure is expressed as
    /// a call-minus-put pair at the anchor, so the chain must quote both
    /// anchor options and every leg strike.
    pub fn present_value(&self, bond_price: f64, chain: &OptionChain) -> Result<f64> {
        if !(bond_price > 0.0 && bond_price <= 1.0) {
            return Err(Error::Domain(format!(
                "discount factor must lie in (0, 1], got {bond_price}"
            )));
        }
        let anchor_call = chain.premium(OptionKind::Call, self.anchor)?;
        let anchor_put = chain.premium(OptionKind::Put, self.anchor)?;
        let mut v =
            self.bond_notional * bond_price + self.futures_notional * (anchor_call - anchor_put);
        for leg in &self.put_legs {
            v += leg.weight * chain.premium(OptionKind::Put, leg.strike)?;
        }
        for leg in &self.call_legs {
            v += leg.weight * chain.premium(OptionKind::Call, leg.strike)?;
        }
        Ok(v)
    }

    pub fn n_legs(&self) -> usize {
        self.put_legs.len() + self.call_legs.len()
    }

    /// Synthetic-futures expansion for venues without a futures market:
    /// a long call and a short put at the anchor, both sized by the
    /// futures notional, have terminal payoff `(P - m)+ - (m - P)+ =
    /// P - m`, identical to the futures leg.
    pub fn anchor_pair_legs(&self) -> [(OptionKind, OptionLeg); 2] {
        [
            (
                OptionKind::Call,
                OptionLeg {
                    strike: self.anchor,
                    weight: self.futures_notional,
                },
            ),
            (
                OptionKind::Put,
                OptionLeg {
                    strike: self.anchor,
                    weight: -self.futures_notional,
                },
            ),
        ]
    }
}

fn side_legs<F>(
    lo: f64,
    hi: f64,
    n: usize,
    spacing: Spacing,
    curvature: F,
) -> Result<Vec<OptionLeg>>
where
    F: Fn(f64) -> f64,
{
    let edges = GridSpec::new(lo, hi, n + 1, spacing)?.points();
    let mut legs = Vec::with_capacity(n);
    for w in edges.windows(2) {
        let strike = 0.5 * (w[0] + w[1]);
        let weight = curvature(strike) * (w[1] - w[0]);
        if !weight.is_finite() {
            return Err(Error::Domain(format!(
                "curvature produced a non-finite weight at strike {strike}"
            )));
        }
        legs.push(OptionLeg { strike, weight });
    }
    Ok(legs)
}

/// Bond notional replicating the pool value at the anchor: `2 sqrt(k m)`.
pub fn bond_notional(k: f64, m: f64) -> Result<f64> {
    check_positive(k, m)?;
    Ok(2.0 * (k * m).sqrt())
}

/// Futures notional: slope of the pool value at the anchor, `sqrt(k/m)`.
pub fn futures_notional(k: f64, m: f64) -> Result<f64> {
    check_positive(k, m)?;
    Ok((k / m).sqrt())
}

/// Strike density of the pool-value replication: `-sqrt(k/K^3)/2`,
/// negative at every strike.
pub fn option_density(k: f64, strike: f64) -> Result<f64> {
    check_positive(k, strike)?;
    Ok(-0.5 * (k / (strike * strike * strike)).sqrt())
}

/// Upper bound on the payoff shortfall from omitting put strikes below
/// `k_min`: the omitted density integrates, weighted by each put's maximal
/// payoff, to `sqrt(k * k_min)` (attained as the terminal price tends to
/// zero). The raw density mass below `k_min` diverges, so this
/// value-weighted form is the meaningful coverage-floor diagnostic.
pub fn put_tail_value_bound(k: f64, k_min: f64) -> Result<f64> {
    check_positive(k, k_min)?;
    Ok((k * k_min).sqrt())
}

/// Pool-value replication on the given strike grid.
pub fn build_portfolio(k: f64, m: f64, grid: &StrikeGrid) -> Result<ReplicationPortfolio> {
    let bond = bond_notional(k, m)?;
    let futures = futures_notional(k, m)?;
    ReplicationPortfolio::for_payoff(
        m,
        bond,
        futures,
        |strike| -0.5 * (k / (strike * strike * strike)).sqrt(),
        grid,
    )
}

fn check_positive(k: f64, other: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) || !(other > 0.0 && other.is_finite()) {
        return Err(Error::Domain(format!(
            "inputs must be positive and finite, got {k} and {other}"
        )));
    }
    Ok(())
}

/// One row of a replication error sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub price: f64,
    pub target: f64,
    pub replicated: f64,
    pub rel_error: f64,
    /// Whether the price lies inside the strike coverage `[k_min, k_max]`;
    /// out-of-band points are reported but excluded from the headline
    /// maximum because the truncated strip cannot track the target there.
    pub in_band: bool,
}

/// Replication error of the pool-value portfolio over an evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSweep {
    pub points: Vec<SweepPoint>,
    /// Maximum relative error over in-band points (NaN when every
    /// evaluation point is out of band).
    pub max_rel_error: f64,
    pub argmax_price: f64,
    pub n_in_band: usize,
    pub n_out_of_band: usize,
}

/// Builds the pool-value portfolio and sweeps `|payoff - 2 sqrt(k p)| /
/// (2 sqrt(k p))` over the evaluation grid.
pub fn replication_error(k: f64, m: f64, grid: &StrikeGrid, eval: &GridSpec) -> Result<ErrorSweep> {
    let portfolio = build_portfolio(k, m, grid)?;
    let mut points = Vec::with_capacity(eval.n);
    let mut worst: Option<(f64, f64)> = None;
    let mut n_in_band = 0;
    let mut n_out_of_band = 0;
    for p in eval.points() {
        let target = pool_value(k, p)?;
        let replicated = portfolio.payoff(p);
        let rel_error = (replicated - target).abs() / target;
        let in_band = p >= grid.k_min && p <= grid.k_max;
        if in_band {
            n_in_band += 1;
            if worst.is_none_or(|(e, _)| rel_error > e) {
                worst = Some((rel_error, p));
            }
        } else {
            n_out_of_band += 1;
        }
        points.push(SweepPoint {
            price: p,
            target,
            replicated,
            rel_error,
            in_band,
        });
    }
    let (max_rel_error, argmax_price) = worst.unwrap_or((f64::NAN, f64::NAN));
    Ok(ErrorSweep {
        points,
        max_rel_error,
        argmax_price,
        n_in_band,
        n_out_of_band,
    })
}
