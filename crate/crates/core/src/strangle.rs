//! Long-Strangle hedge construction, coverage certification, and
//! cheapest-feasible-plan search over an options chain.
//!
//! A position with capital `c` entered at price `p0` earning a pool
//! return `r_p` over the horizon is hedged with `q_p` puts struck at
//! `k_p` and `q_c` calls struck at `k_c`. The combined terminal payoff
//!
//! ```text
//! r_p c + q_c (P - k_c)+ + q_p (k_p - P)+ - D + il(P),   D = q_c d_c + q_p d_p
//! ```
//!
//! is guaranteed non-negative on a coverage interval `[p_i, p_s]`
//! containing `p0` whenever three inequalities hold: the put quantity
//! dominates the IL slope at `p_i`, the call quantity dominates the
//! (negated) IL slope at `p_s`, and the premium outlay plus the worst IL
//! at the strikes stays within the pool return. Certification reports the
//! three checks and, when they pass, confirms the claim with a brute-force
//! grid sweep. The inequalities are sufficient, not necessary: a failing
//! check means "uncertified", not "unsafe".

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::chain::{self, OptionChain, OptionKind};
use crate::il::PositionParams;
use crate::oracle::{certify_nonnegative, GridSpec, Spacing};
use crate::{Error, Result};

/// Default certification grid density.
pub const DEFAULT_ORACLE_POINTS: usize = 10_000;
/// Default certification tolerance as a fraction of the capital.
pub const DEFAULT_EPS_FACTOR: f64 = 1e-9;

/// A priced Long Strangle: strikes, quantities, per-unit premiums, and the
/// resulting total cost `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HedgePlan {
    pub k_p: f64,
    pub k_c: f64,
    pub q_p: f64,
    pub q_c: f64,
    pub d_p: f64,
    pub d_c: f64,
    /// Total premium outlay `q_c d_c + q_p d_p`.
    pub cost: f64,
}

impl HedgePlan {
    pub fn new(k_p: f64, k_c: f64, q_p: f64, q_c: f64, d_p: f64, d_c: f64) -> Result<Self> {
        if !(k_p > 0.0 && k_p.is_finite() && k_c.is_finite() && k_p <= k_c) {
            return Err(Error::Domain(format!(
                "strikes must satisfy 0 < k_p <= k_c, got k_p={k_p}, k_c={k_c}"
            )));
        }
        for (name, v) in [("q_p", q_p), ("q_c", q_c), ("d_p", d_p), ("d_c", d_c)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(Self {
            k_p,
            k_c,
            q_p,
            q_c,
            d_p,
            d_c,
            cost: q_c * d_c + q_p * d_p,
        })
    }
}

/// Position, pool return over the hedge horizon, and coverage interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HedgeContext {
    params: PositionParams,
    r_p: f64,
    p_i: f64,
    p_s: f64,
}

impl HedgeContext {
    /// `r_p` is the total pool return over the horizon (not annualized);
    /// the interval must bracket the entry price, degenerate endpoints
    /// included.
    pub fn new(params: PositionParams, r_p: f64, p_i: f64, p_s: f64) -> Result<Self> {
        if !(r_p >= 0.0 && r_p.is_finite()) {
            return Err(Error::Domain(format!(
                "pool return must be non-negative, got {r_p}"
            )));
        }
        let p0 = params.entry_price();
        if !(p_i > 0.0 && p_i <= p0 && p0 <= p_s && p_s.is_finite()) {
            return Err(Error::Domain(format!(
                "coverage interval must satisfy 0 < p_i <= p0 <= p_s, got [{p_i}, {p_s}] around {p0}"
            )));
        }
        Ok(Self {
            params,
            r_p,
            p_i,
            p_s,
        })
    }

    pub fn params(&self) -> &PositionParams {
        &self.params
    }

    pub fn pool_return(&self) -> f64 {
        self.r_p
    }

    pub fn p_i(&self) -> f64 {
        self.p_i
    }

    pub fn p_s(&self) -> f64 {
        self.p_s
    }

    /// Smallest put quantity covering the interval:
    /// `(c/2) (1/sqrt(p_i p0) - 1/p0)`, the IL slope at `p_i`.
    pub fn min_put_qty(&self) -> f64 {
        let c = self.params.capital();
        let p0 = self.params.entry_price();
        0.5 * c * (1.0 / (self.p_i * p0).sqrt() - 1.0 / p0)
    }

    /// Smallest call quantity: `-(c/2) (1/sqrt(p_s p0) - 1/p0)`, the
    /// negated IL slope at `p_s`.
    pub fn min_call_qty(&self) -> f64 {
        let c = self.params.capital();
        let p0 = self.params.entry_price();
        -0.5 * c * (1.0 / (self.p_s * p0).sqrt() - 1.0 / p0)
    }

    /// Strike admissibility `p_i <= k_p <= p0 <= k_c <= p_s`; the
    /// certification case split relies on it.
    pub fn admits(&self, plan: &HedgePlan) -> bool {
        let p0 = self.params.entry_price();
        self.p_i <= plan.k_p && plan.k_p <= p0 && p0 <= plan.k_c && plan.k_c <= self.p_s
    }
}

/// Net strangle payoff at expiry (gross option payoff minus the cost).
pub fn strangle_payoff(plan: &HedgePlan, p: f64) -> f64 {
    plan.q_c * (p - plan.k_c).max(0.0) + plan.q_p * (plan.k_p - p).max(0.0) - plan.cost
}

/// Combined pool-plus-strangle payoff at expiry; the cost is charged once.
pub fn combined_payoff(ctx: &HedgeContext, plan: &HedgePlan, p: f64) -> f64 {
    ctx.r_p * ctx.params.capital() + strangle_payoff(plan, p) + ctx.params.il_raw(p)
}

/// One side of a certification inequality, stored as `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl InequalityCheck {
    fn of(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            pass: lhs <= rhs,
        }
    }

    /// Margin by which the inequality holds (negative when it fails).
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Premium budget check: `D - min(il(k_c), il(k_p)) <= r_p c`.
pub fn budget_ok(ctx: &HedgeContext, plan: &HedgePlan) -> InequalityCheck {
    let worst_il = ctx.params.il_raw(plan.k_c).min(ctx.params.il_raw(plan.k_p));
    InequalityCheck::of(plan.cost - worst_il, ctx.r_p * ctx.params.capital())
}

/// Grid-sweep confirmation attached to a report when all inequalities pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub min: f64,
    pub argmin: f64,
    pub n_grid: usize,
    pub pass: bool,
}

/// Outcome of certifying a plan against a context.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub ineq_put: InequalityCheck,
    pub ineq_budget: InequalityCheck,
    pub ineq_call: InequalityCheck,
    /// Present iff the three inequalities passed and the sweep ran.
    pub oracle: Option<OracleCheck>,
}

impl CertificationReport {
    pub fn inequalities_pass(&self) -> bool {
        self.ineq_put.pass && self.ineq_budget.pass && self.ineq_call.pass
    }

    /// Fully certified: inequalities hold and the grid sweep confirmed
    /// non-negative combined payoff over the whole interval.
    pub fn certified(&self) -> bool {
        self.inequalities_pass() && self.oracle.is_some_and(|o| o.pass)
    }
}

/// Certifies with the default grid density and tolerance `1e-9 * c`.
pub fn verify_plan(ctx: &HedgeContext, plan: &HedgePlan) -> Result<CertificationReport> {
    verify_plan_with(
        ctx,
        plan,
        DEFAULT_ORACLE_POINTS,
        DEFAULT_EPS_FACTOR * ctx.params().capital(),
    )
}

/// Checks the three coverage inequalities and, when they all hold, sweeps
/// the combined payoff over `[p_i, p_s]` (strikes always included as grid
/// breakpoints) asserting it stays above `-eps`.
pub fn verify_plan_with(
    ctx: &HedgeContext,
    plan: &HedgePlan,
    oracle_n: usize,
    eps: f64,
) -> Result<CertificationReport> {
    if !ctx.admits(plan) {
        return Err(Error::Domain(format!(
            "strikes [{}, {}] are inadmissible for the interval [{}, {}] around {}",
            plan.k_p,
            plan.k_c,
            ctx.p_i,
            ctx.p_s,
            ctx.params.entry_price()
        )));
    }
    let ineq_put = InequalityCheck::of(ctx.min_put_qty(), plan.q_p);
    let ineq_budget = budget_ok(ctx, plan);
    let ineq_call = InequalityCheck::of(ctx.min_call_qty(), plan.q_c);

    let oracle = if ineq_put.pass && ineq_budget.pass && ineq_call.pass {
        let spec = GridSpec::new(ctx.p_i, ctx.p_s, oracle_n, Spacing::Geometric)?;
        let cert = certify_nonnegative(
            |p| combined_payoff(ctx, plan, p),
            &spec,
            &[plan.k_p, plan.k_c],
            eps,
        )?;
        Some(OracleCheck {
            min: cert.min,
            argmin: cert.argmin,
            n_grid: cert.n_points,
            pass: cert.pass,
        })
    } else {
        None
    };

    Ok(CertificationReport {
        ineq_put,
        ineq_budget,
        ineq_call,
        oracle,
    })
}

/// Exhaustive cheapest-plan search over every admissible (put, call)
/// strike pair of the chain at one expiry.
///
/// Quantities are fixed at the interval minima (they depend only on the
/// context), so each pair is priced as `D = q_p mid_p + q_c mid_c` and the
/// minimum-cost pair passing the budget wins. Ties break toward the
/// narrower strangle, then the lower call strike.
pub fn optimize_plan(
    ctx: &HedgeContext,
    chain: &OptionChain,
    expiry: NaiveDate,
) -> Result<HedgePlan> {
    let p0 = ctx.params.entry_price();
    let puts = chain::filter(chain, expiry, OptionKind::Put, ctx.p_i..=p0);
    let calls = chain::filter(chain, expiry, OptionKind::Call, p0..=ctx.p_s);
    if puts.is_empty() || calls.is_empty() {
        return Err(Error::NoAdmissiblePair);
    }

    let q_p = ctx.min_put_qty();
    let q_c = ctx.min_call_qty();
    let mut best: Option<HedgePlan> = None;
    let mut min_violation = f64::INFINITY;

    for put in &puts {
        let d_p = put.mid_price()?;
        for call in &calls {
            let d_c = call.mid_price()?;
            let plan = HedgePlan::new(put.strike, call.strike, q_p, q_c, d_p, d_c)?;
            let budget = budget_ok(ctx, &plan);
            if !budget.pass {
                min_violation = min_violation.min(-budget.slack());
                continue;
            }
            let better = match &best {
                None => true,
                Some(b) => {
                    let key = (plan.cost, (plan.k_c - plan.k_p).abs(), plan.k_c);
                    let best_key = (b.cost, (b.k_c - b.k_p).abs(), b.k_c);
                    key < best_key
                }
            };
            if better {
                best = Some(plan);
            }
        }
    }

    best.ok_or(Error::Infeasible { min_violation })
}
