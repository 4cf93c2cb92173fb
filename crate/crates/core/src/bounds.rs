//! Closed-form ratio bounds and the per-run inequality checker.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Result, SteinerError};
use crate::graph::Cost;

/// Relative slack applied when an exact cost is compared with a float bound.
pub const RELATIVE_PADDING: f64 = 1e-9;

/// Asymptotic approximation ratio `A(α*)`, rounded as usually quoted.
pub const GUARANTEE: f64 = 1.4295;

/// Outcome of one checked inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub satisfied: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, satisfied: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            satisfied,
            detail: detail.into(),
        }
    }

    /// Exact `lhs <= rhs`.
    pub fn le(name: impl Into<String>, lhs: Cost, rhs: Cost) -> Self {
        Check::new(name, lhs <= rhs, format!("{lhs} <= {rhs}"))
    }

    /// `lhs <= rhs` against a float bound, padded by [`RELATIVE_PADDING`].
    pub fn le_float(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let ok = lhs <= rhs + RELATIVE_PADDING * rhs.abs().max(1.0);
        Check::new(name, ok, format!("{lhs} <= {rhs:.12}"))
    }
}

/// `A(α) = (ln((2 − α)/(1 − α)) + 1)(1 − α) + α`.
pub fn curve_a(alpha: f64) -> f64 {
    (((2.0 - alpha) / (1.0 - alpha)).ln() + 1.0) * (1.0 - alpha) + alpha
}

/// `B(α) = 2α`.
pub fn curve_b(alpha: f64) -> f64 {
    2.0 * alpha
}

/// Both ratio curves at `alpha ∈ (½, 1)`.
pub fn ratio_curves(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(SteinerError::Domain(format!(
            "alpha = {alpha} is outside (1/2, 1)"
        )));
    }
    Ok((curve_a(alpha), curve_b(alpha)))
}

/// Crossing point of the two ratio curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaStar {
    pub alpha: f64,
    pub ratio: f64,
}

/// Bisects `A − B` on `(½, 1)` until the bracket is narrower than `tolerance`.
pub fn solve_alpha_star(tolerance: f64) -> AlphaStar {
    let tolerance = if tolerance > 0.0 {
        tolerance
    } else {
        f64::EPSILON
    };
    let (mut lo, mut hi) = (0.5_f64, 1.0_f64);
    // A − B is positive at ½⁺ and negative at 1⁻.
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if curve_a(mid) - curve_b(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = 0.5 * (lo + hi);
    AlphaStar {
        alpha,
        ratio: curve_a(alpha),
    }
}

/// `(ln((mst − c)/(opt_k − c)) + 1)(opt_k − c) + c` with `c = cost(T_base)`;
/// equals `c` in the limit `opt_k = c`.
pub fn theorem1_bound(mst_cost: Cost, c_base: Cost, opt_k: Cost) -> Result<f64> {
    if opt_k < c_base {
        return Err(SteinerError::Domain(format!(
            "opt_k = {opt_k} is below the base tree cost {c_base}"
        )));
    }
    if mst_cost < opt_k {
        return Err(SteinerError::Domain(format!(
            "mst = {mst_cost} is below opt_k = {opt_k}"
        )));
    }
    if opt_k == c_base {
        return Ok(c_base as f64);
    }
    let span = (opt_k - c_base) as f64;
    let head = (mst_cost - c_base) as f64;
    Ok(((head / span).ln() + 1.0) * span + c_base as f64)
}

/// `1 + 1/⌊log₂ k⌋`.
pub fn rho_k(k: usize) -> Result<Ratio<u64>> {
    if k < 2 {
        return Err(SteinerError::InvalidK(k));
    }
    let floor_log = (usize::BITS - 1 - k.leading_zeros()) as u64;
    Ok(Ratio::new(floor_log + 1, floor_log))
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Costs of a finished run that the checker reasons about.
#[derive(Debug, Clone, Default)]
pub struct RunFacts {
    pub k: usize,
    pub mst: Cost,
    pub cost: Cost,
    pub c_base: Option<Cost>,
    /// Merged phase-1 tree before expansion into the input graph.
    pub s1_merge: Option<Cost>,
    /// Merged phase-2 tree before expansion into the input graph.
    pub s2_merge: Option<Cost>,
    pub opt: Option<Cost>,
    pub opt_k: Option<Cost>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub mst_cost: Cost,
    pub c_base: Option<Cost>,
    pub opt_k: Option<Cost>,
    pub opt: Option<Cost>,
    pub alpha: Option<Ratio<i64>>,
    pub alpha_value: Option<f64>,
    pub theorem1_bound: Option<f64>,
    pub theorem2_a: Option<f64>,
    pub theorem2_b: Option<Cost>,
    pub checks: Vec<Check>,
    pub satisfied: bool,
}

/// Evaluates every inequality the available costs make checkable.
pub fn check_run(facts: &RunFacts) -> BoundReport {
    let mut checks = vec![Check::le("solution_le_mst", facts.cost, facts.mst)];
    let mut alpha = None;
    let mut t1 = None;
    if let Some(c) = facts.c_base {
        checks.push(Check::le("theorem2_b", facts.cost, 2 * c));
        if let Some(s1) = facts.s1_merge {
            checks.push(Check::le("lemma3_half_s1", s1, 2 * c));
        }
        if let Some(ok) = facts.opt_k {
            checks.push(Check::le("lemma2_base_le_opt_k", c, ok));
            checks.push(Check::new(
                "alpha_at_least_half",
                2 * c >= ok,
                format!("2 * {c} >= {ok}"),
            ));
            if ok > 0 {
                alpha = Some(Ratio::new(c, ok));
            }
            match theorem1_bound(facts.mst, c, ok) {
                Ok(b) => {
                    t1 = Some(b);
                    if let Some(s2) = facts.s2_merge {
                        checks.push(Check::le_float("theorem2_a", facts.cost as f64, b));
                        checks.push(Check::le_float("theorem1", s2 as f64, b));
                    }
                }
                Err(e) => checks.push(Check::new("theorem1_domain", false, e.to_string())),
            }
        }
    }
    if let Some(o) = facts.opt {
        checks.push(Check::le("opt_le_solution", o, facts.cost));
        checks.push(Check::le("mst_le_twice_opt", facts.mst, 2 * o));
        if let Ok(rho) = rho_k(facts.k) {
            let rho = ratio_f64(rho);
            checks.push(Check::le_float(
                "ratio_guarantee",
                facts.cost as f64,
                rho * GUARANTEE * o as f64,
            ));
            if let Some(ok) = facts.opt_k {
                checks.push(Check::le("opt_le_opt_k", o, ok));
                checks.push(Check::le_float(
                    "opt_k_le_rho_opt",
                    ok as f64,
                    rho * o as f64,
                ));
            }
        }
    }
    let satisfied = checks.iter().all(|c| c.satisfied);
    BoundReport {
        mst_cost: facts.mst,
        c_base: facts.c_base,
        opt_k: facts.opt_k,
        opt: facts.opt,
        alpha_value: alpha.map(|a: Ratio<i64>| *a.numer() as f64 / *a.denom() as f64),
        alpha,
        theorem1_bound: t1,
        theorem2_a: t1,
        theorem2_b: facts.c_base.map(|c| 2 * c),
        checks,
        satisfied,
    }
}
