//! One-shot analysis of the stage game: best responses, the symmetric Nash
//! equilibrium and the joint-surplus optimum with its second-order test.

use serde::Serialize;

use crate::error::Result;
use crate::model::GameParams;

/// Joint-surplus values at the candidate maximisers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryValues {
    pub u_at_00: f64,
    pub u_at_alpha_alpha: f64,
    pub u_at_hat: f64,
}

/// Closed-form summary of the stage game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub x_star: f64,
    pub u_star: f64,
    pub x_hat: f64,
    pub u_hat_per_player: f64,
    pub joint_at_hat: f64,
    pub hessian_det: f64,
    pub boundary_values: BoundaryValues,
    /// Set when the report was computed from unchecked parameters.
    pub unchecked: bool,
}

/// Sign conditions of the joint-surplus Hessian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondOrderCertificate {
    pub d2_own: f64,
    pub hessian_det: f64,
    pub concave: bool,
}

/// Best response `alpha (1 + c1 x_other) / (4 c2)` to the partner's effort.
pub fn best_response_closed(params: &GameParams, x_other: f64) -> Result<f64> {
    params.check_effort(x_other)?;
    Ok(best_response_unchecked(params, x_other))
}

#[inline]
pub(crate) fn best_response_unchecked(params: &GameParams, x_other: f64) -> f64 {
    params.alpha() * (1.0 + params.c1() * x_other) / (4.0 * params.c2())
}

/// Nash effort `alpha / (4 c2 - alpha c1)`.
pub fn nash_effort(params: &GameParams) -> f64 {
    params.alpha() / params.k()
}

/// Symmetric Nash equilibrium profile.
pub fn nash_equilibrium(params: &GameParams) -> (f64, f64) {
    let x = nash_effort(params);
    (x, x)
}

/// Per-player payoff in the Nash equilibrium,
/// `alpha^2 (6 c2 - alpha c1) / (2 (4 c2 - alpha c1)^2)`.
pub fn nash_payoff(params: &GameParams) -> f64 {
    let a = params.alpha();
    let k = params.k();
    a * a * (6.0 * params.c2() - a * params.c1()) / (2.0 * k * k)
}

/// Joint-surplus maximiser `alpha / (2 c2 - alpha c1)`, per player.
pub fn optimal_effort(params: &GameParams) -> f64 {
    params.alpha() / params.l()
}

/// Per-player payoff at the optimum, `alpha^2 / (2 (2 c2 - alpha c1))`.
pub fn optimal_payoff(params: &GameParams) -> f64 {
    let a = params.alpha();
    a * a / (2.0 * params.l())
}

pub fn second_order_certificate(params: &GameParams) -> SecondOrderCertificate {
    let d2_own = -2.0 * params.c2();
    let ac1 = params.alpha() * params.c1();
    let hessian_det = 4.0 * params.c2() * params.c2() - ac1 * ac1;
    SecondOrderCertificate {
        d2_own,
        hessian_det,
        concave: d2_own < 0.0 && hessian_det > 0.0,
    }
}

/// Full closed-form report, including the corner comparison that makes the
/// interior critical point the absolute maximum of the joint surplus.
///
/// On a tie between the interior point and a corner the interior point is
/// reported.
pub fn social_optimum(params: &GameParams) -> EquilibriumReport {
    let a = params.alpha();
    let x_hat = optimal_effort(params);
    let joint_at_hat = a * a / params.l();
    let boundary_values = BoundaryValues {
        u_at_00: 0.0,
        u_at_alpha_alpha: a * a * (2.0 - params.l()),
        u_at_hat: joint_at_hat,
    };
    EquilibriumReport {
        x_star: nash_effort(params),
        u_star: nash_payoff(params),
        x_hat,
        u_hat_per_player: optimal_payoff(params),
        joint_at_hat,
        hessian_det: second_order_certificate(params).hessian_det,
        boundary_values,
        unchecked: !params.is_checked(),
    }
}
