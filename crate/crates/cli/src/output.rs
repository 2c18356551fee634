//! Text and CSV emission helpers. All output is deterministic: floats are
//! printed with shortest round-trip formatting and rows follow input
//! order, so identical invocations produce byte-identical files.

use std::fmt::Write as _;

use cpmm_hedge_core::replication::ErrorSweep;
use cpmm_hedge_core::strangle::{combined_payoff, strangle_payoff, InequalityCheck};
use cpmm_hedge_core::{
    CertificationReport, GridSpec, HedgeContext, HedgePlan, ReplicationPortfolio, Spacing,
};

pub fn legs_csv(port: &ReplicationPortfolio, anchor_pair: bool) -> String {
    let mut out = String::from("side,strike,weight\n");
    for leg in &port.put_legs {
        let _ = writeln!(out, "put,{},{}", leg.strike, leg.weight);
    }
    if anchor_pair {
        // Futures exposure rewritten as anchor-strike options.
        for (kind, leg) in port.anchor_pair_legs() {
            let _ = writeln!(out, "{kind},{},{}", leg.strike, leg.weight);
        }
    }
    for leg in &port.call_legs {
        let _ = writeln!(out, "call,{},{}", leg.strike, leg.weight);
    }
    out
}

pub fn error_curve_csv(sweep: &ErrorSweep) -> String {
    let mut out = String::from("price,target,replicated,rel_error\n");
    for p in &sweep.points {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p.price, p.target, p.replicated, p.rel_error
        );
    }
    out
}

pub fn il_curve_csv(params: &cpmm_hedge_core::PositionParams, prices: &[f64]) -> String {
    let mut out = String::from("price,il,v_pool,v_hold\n");
    for &p in prices {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p,
            params.il(p).unwrap_or(f64::NAN),
            params.v_pool(p).unwrap_or(f64::NAN),
            params.v_hold(p).unwrap_or(f64::NAN)
        );
    }
    out
}

pub fn payoff_curve_csv(ctx: &HedgeContext, plan: &HedgePlan, curve_n: usize) -> String {
    let mut out = String::from("price,il,strangle,combined\n");
    let spec = GridSpec::new(ctx.p_i(), ctx.p_s(), curve_n.max(2), Spacing::Uniform)
        .expect("context interval is a valid grid");
    for p in spec.points_with(&[plan.k_p, plan.k_c]) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            p,
            ctx.params().il(p).unwrap_or(f64::NAN),
            strangle_payoff(plan, p),
            combined_payoff(ctx, plan, p)
        );
    }
    out
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn ineq_line(out: &mut String, label: &str, check: &InequalityCheck) {
    let _ = writeln!(
        out,
        "{label:<14} {} <= {}  [{}]",
        check.lhs,
        check.rhs,
        verdict(check.pass)
    );
}

pub fn report_text(ctx: &HedgeContext, plan: &HedgePlan, report: &CertificationReport) -> String {
    let mut out = String::new();
    let params = ctx.params();
    let _ = writeln!(
        out,
        "context        capital {}  entry {}  pool return {}  interval [{}, {}]",
        params.capital(),
        params.entry_price(),
        ctx.pool_return(),
        ctx.p_i(),
        ctx.p_s()
    );
    let _ = writeln!(
        out,
        "plan           put {} @ {} (premium {})  call {} @ {} (premium {})  cost {}",
        plan.q_p, plan.k_p, plan.d_p, plan.q_c, plan.k_c, plan.d_c, plan.cost
    );
    ineq_line(&mut out, "put quantity", &report.ineq_put);
    ineq_line(&mut out, "budget", &report.ineq_budget);
    ineq_line(&mut out, "call quantity", &report.ineq_call);
    match &report.oracle {
        Some(o) => {
            let _ = writeln!(
                out,
                "oracle         min {} at price {} ({} points)  [{}]",
                o.min,
                o.argmin,
                o.n_grid,
                verdict(o.pass)
            );
        }
        None => {
            let _ = writeln!(out, "oracle         skipped (an inequality failed; uncertified, not necessarily unsafe)");
        }
    }
    let _ = writeln!(
        out,
        "certified      {}",
        if report.certified() { "yes" } else { "no" }
    );
    out
}
