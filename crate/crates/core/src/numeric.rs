//! Numerical oracles that are structurally independent of the closed forms:
//! golden-section maximisation, best-response iteration and a
//! cancellation-safe quadratic solver.

use serde::Serialize;

use crate::equilibrium::best_response_unchecked;
use crate::error::{Error, Result};
use crate::model::{payoff_of, GameParams};

/// Default argmax tolerance.
pub const DEFAULT_ARGMAX_TOL: f64 = 1e-8;
/// Default fixed-point tolerance.
pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-12;

/// `1 / phi`, the interval shrink factor per golden-section step.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveReport {
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Iteration budget for golden section on a bracket of `width` down to `tol`.
pub fn golden_section_budget(width: f64, tol: f64) -> usize {
    ((width / tol).ln() / (1.0 / 0.618f64).ln()).ceil().max(0.0) as usize + 2
}

/// Maximises a unimodal `f` on `[lo, hi]` by golden-section search.
///
/// Stops once the bracket is no wider than `tol`; the midpoint of the final
/// bracket is returned. `residual` is the final bracket width.
pub fn maximize_unimodal<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<SolveReport>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::BadBracket { lo, hi });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let max_iter = golden_section_budget(hi - lo, tol);

    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;

    while b - a > tol {
        if iterations == max_iter {
            return Err(Error::NoConvergence { iterations, residual: b - a });
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
        iterations += 1;
    }

    Ok(SolveReport {
        value: 0.5 * (a + b),
        iterations,
        residual: b - a,
        converged: true,
    })
}

/// Best response found by maximising the own payoff over `[0, alpha]`.
pub fn best_response_numeric(params: &GameParams, x_other: f64, tol: f64) -> Result<f64> {
    params.check_effort(x_other)?;
    let report = maximize_unimodal(|x| payoff_of(params, x, x_other), 0.0, params.alpha(), tol)?;
    Ok(report.value)
}

/// Iterates of the best-response map starting from zero effort.
pub fn best_response_iterates(params: &GameParams) -> impl Iterator<Item = f64> + '_ {
    std::iter::successors(Some(0.0), move |&x| Some(best_response_unchecked(params, x)))
}

/// Symmetric Nash effort by iterated best response from zero effort.
///
/// `residual` is the fixed-point residual `|B(x) - x|` at the returned value.
pub fn nash_fixed_point(params: &GameParams, tol: f64, max_iter: usize) -> Result<SolveReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let mut residual = f64::INFINITY;
    for (iterations, x) in best_response_iterates(params).enumerate().skip(1).take(max_iter) {
        residual = (best_response_unchecked(params, x) - x).abs();
        if residual <= tol {
            return Ok(SolveReport { value: x, iterations, residual, converged: true });
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual })
}

/// Real roots of `a x^2 + b x + c`, ascending.
///
/// The larger-magnitude root comes from `q = -(b + sign(b) sqrt(disc)) / 2`
/// and the other from `c / q`, avoiding cancellation.
pub fn quadratic_roots_numeric(a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    if a == 0.0 {
        return Err(Error::DegenerateLeadingCoefficient);
    }
    let discriminant = b * b - 4.0 * a * c;
    if discriminant < 0.0 {
        return Err(Error::NoRealRoots { discriminant });
    }
    let q = -0.5 * (b + b.signum() * discriminant.sqrt());
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    Ok(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}
