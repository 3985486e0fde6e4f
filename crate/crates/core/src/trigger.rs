//! Grim-trigger analysis of the infinitely repeated game.
//!
//! Both partners play a target effort until someone deviates and the stage
//! Nash effort forever after. Cooperation at the joint optimum is an SPE iff
//! `delta >= K^2 / (8 c2 l + K^2)` with `K = 4 c2 - alpha c1`,
//! `l = 2 c2 - alpha c1`. Below that threshold the largest sustainable target
//! is the upper root of the sustainability quadratic
//! `A x^2 + B x + C >= 0`.

use serde::Serialize;

use crate::equilibrium::{best_response_unchecked, nash_effort, nash_payoff, optimal_effort};
use crate::error::{Error, Result};
use crate::model::{payoff_of, GameParams};

/// Relative tolerance of the cooperation/deviation comparison.
pub const SPE_REL_TOL: f64 = 1e-12;

/// Coefficients and roots of the sustainability quadratic for one `delta`.
///
/// Coefficients use the `1/(16 c2)`-scaled normalisation, under which
/// `sqrt(B^2 - 4AC) = 2 alpha c2 delta / K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SustainabilityQuadratic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `B^2 - 4AC` evaluated from the coefficients.
    pub discriminant: f64,
    /// Closed-form square root of the discriminant.
    pub sqrt_disc: f64,
    pub root_low: f64,
    pub root_high: f64,
}

impl SustainabilityQuadratic {
    /// Value of `A x^2 + B x + C`.
    pub fn eval(&self, x: f64) -> f64 {
        (self.a * x + self.b) * x + self.c
    }
}

/// Cooperation versus one-shot deviation under grim trigger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriggerReport {
    pub delta: f64,
    pub target_effort: f64,
    pub coop_pv: f64,
    pub dev_stage_payoff: f64,
    pub dev_best_response: f64,
    pub dev_pv: f64,
    pub is_spe: bool,
    pub critical_delta: f64,
    pub unchecked: bool,
}

/// Which regime determined the maximal sustainable effort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SustainBranch {
    /// `delta = 0`: only the stage Nash effort.
    OneShotNash,
    /// `0 < delta < delta*`: upper root of the sustainability quadratic.
    QuadraticRoot,
    /// `delta >= delta*`: the joint optimum.
    FullCooperation,
}

impl SustainBranch {
    pub fn describe(&self) -> &'static str {
        match self {
            SustainBranch::OneShotNash => "one-shot Nash",
            SustainBranch::QuadraticRoot => "below-threshold quadratic root",
            SustainBranch::FullCooperation => "full cooperation (δ ≥ δ*)",
        }
    }
}

/// Limits of the upper root at both ends of `(0, delta*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryLimits {
    pub at_zero: f64,
    pub at_critical: f64,
}

pub(crate) fn check_delta(delta: f64) -> Result<f64> {
    if (0.0..1.0).contains(&delta) {
        Ok(delta)
    } else {
        Err(Error::DeltaOutOfRange { value: delta, interval: "[0, 1)" })
    }
}

/// Smallest discount factor at which grim-trigger cooperation at the joint
/// optimum is subgame perfect.
pub fn critical_delta(params: &GameParams) -> f64 {
    let k = params.k();
    let k2 = k * k;
    k2 / (8.0 * params.c2() * params.l() + k2)
}

/// The deviator's best effort against a partner who plays `x_bar`.
pub fn best_deviation_against(params: &GameParams, x_bar: f64) -> Result<f64> {
    params.check_effort(x_bar)?;
    Ok(best_response_unchecked(params, x_bar))
}

/// One-period payoff of a best-responding deviator against `x_bar`,
/// `(alpha/2) (x_bar + alpha (1 + c1 x_bar)^2 / (8 c2))`.
pub fn deviation_stage_payoff(params: &GameParams, x_bar: f64) -> Result<f64> {
    params.check_effort(x_bar)?;
    Ok(deviation_payoff_unchecked(params, x_bar))
}

#[inline]
fn deviation_payoff_unchecked(params: &GameParams, x_bar: f64) -> f64 {
    let a = params.alpha();
    let s = 1.0 + params.c1() * x_bar;
    a / 2.0 * (x_bar + a / (8.0 * params.c2()) * s * s)
}

/// Present values of cooperating at `x_bar` forever versus deviating once and
/// facing Nash reversion.
pub fn trigger_report(params: &GameParams, delta: f64, x_bar: f64) -> Result<TriggerReport> {
    check_delta(delta)?;
    params.check_effort(x_bar)?;
    let coop_pv = payoff_of(params, x_bar, x_bar) / (1.0 - delta);
    let dev_stage_payoff = deviation_payoff_unchecked(params, x_bar);
    let dev_pv = dev_stage_payoff + delta * nash_payoff(params) / (1.0 - delta);
    let scale = coop_pv.abs().max(1.0);
    Ok(TriggerReport {
        delta,
        target_effort: x_bar,
        coop_pv,
        dev_stage_payoff,
        dev_best_response: best_response_unchecked(params, x_bar),
        dev_pv,
        is_spe: coop_pv >= dev_pv - SPE_REL_TOL * scale,
        critical_delta: critical_delta(params),
        unchecked: !params.is_checked(),
    })
}

/// Explicit upper root
/// `(alpha/K) (K^2 - delta alpha^2 c1^2 + 32 delta c2^2) / (K^2 - delta alpha^2 c1^2)`.
///
/// Evaluated directly rather than through the quadratic formula, which
/// cancels badly for small `delta`.
fn upper_root(params: &GameParams, delta: f64) -> f64 {
    let k = params.k();
    let ac1 = params.alpha() * params.c1();
    let c2 = params.c2();
    let den = k * k - delta * ac1 * ac1;
    params.alpha() / k * (den + 32.0 * delta * c2 * c2) / den
}

/// Sustainability quadratic for `delta` strictly inside `(0, 1)`.
pub fn sustainability_quadratic(params: &GameParams, delta: f64) -> Result<SustainabilityQuadratic> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange { value: delta, interval: "(0, 1)" });
    }
    let alpha = params.alpha();
    let c1 = params.c1();
    let c2 = params.c2();
    let k = params.k();
    let ac1 = alpha * c1;

    let a = -(k * k - ac1 * ac1 * delta) / (16.0 * c2);
    let b = alpha / (8.0 * c2) * (k + delta * (4.0 * c2 + ac1));
    let c = -(alpha * alpha) / (16.0 * c2) * (delta * (32.0 * c2 * c2 - ac1 * ac1) / (k * k) + 1.0);

    Ok(SustainabilityQuadratic {
        a,
        b,
        c,
        discriminant: b * b - 4.0 * a * c,
        sqrt_disc: 2.0 * alpha * c2 * delta / k,
        root_low: nash_effort(params),
        root_high: upper_root(params, delta),
    })
}

/// Largest target effort sustainable by grim trigger at `delta`, with the
/// branch that produced it.
pub fn max_sustainable_effort_with_branch(params: &GameParams, delta: f64) -> Result<(f64, SustainBranch)> {
    check_delta(delta)?;
    if delta == 0.0 {
        Ok((nash_effort(params), SustainBranch::OneShotNash))
    } else if delta >= critical_delta(params) {
        Ok((optimal_effort(params), SustainBranch::FullCooperation))
    } else {
        Ok((upper_root(params, delta), SustainBranch::QuadraticRoot))
    }
}

/// Largest target effort sustainable by grim trigger at `delta`.
pub fn max_sustainable_effort(params: &GameParams, delta: f64) -> Result<f64> {
    max_sustainable_effort_with_branch(params, delta).map(|(x, _)| x)
}

/// Upper root evaluated at `delta = 0` and at `delta = delta*`.
pub fn corollary_limits(params: &GameParams) -> CorollaryLimits {
    CorollaryLimits {
        at_zero: upper_root(params, 0.0),
        at_critical: upper_root(params, critical_delta(params)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p0() -> GameParams {
        GameParams::new(1.0, 1.0, 1.5).unwrap()
    }

    fn p1() -> GameParams {
        GameParams::new(2.0, 0.5, 2.0).unwrap()
    }

    #[test]
    fn critical_delta_examples() {
        assert_relative_eq!(critical_delta(&p0()), 25.0 / 49.0, max_relative = 1e-15);
        assert_relative_eq!(critical_delta(&p1()), 49.0 / 97.0, max_relative = 1e-15);
        assert_eq!(critical_delta(&GameParams::unchecked(1.0, 0.0, 1.5)), 0.5);
    }

    #[test]
    fn deviation_examples() {
        assert_relative_eq!(best_deviation_against(&p0(), 0.5).unwrap(), 0.25, max_relative = 1e-15);
        assert_relative_eq!(best_deviation_against(&p1(), 2.0 / 3.0).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(best_deviation_against(&p0(), 0.2).unwrap(), 0.2, max_relative = 1e-15);

        assert_relative_eq!(deviation_stage_payoff(&p0(), 0.5).unwrap(), 0.34375, max_relative = 1e-15);
        assert_relative_eq!(deviation_stage_payoff(&p1(), 2.0 / 3.0).unwrap(), 8.0 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(deviation_stage_payoff(&p0(), 0.2).unwrap(), 0.16, max_relative = 1e-15);
        assert!(deviation_stage_payoff(&p0(), -0.1).is_err());
    }

    #[test]
    fn deviation_against_optimum_closed_form() {
        for p in [p0(), p1()] {
            let a = p.alpha();
            let l = p.l();
            let expected = a * a * (5.0 * p.c2() - 2.0 * a * p.c1()) / (4.0 * l * l);
            assert_relative_eq!(
                deviation_stage_payoff(&p, optimal_effort(&p)).unwrap(),
                expected,
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn trigger_report_examples() {
        let r = trigger_report(&p0(), 0.5, 0.5).unwrap();
        assert_relative_eq!(r.coop_pv, 0.5, max_relative = 1e-14);
        assert_relative_eq!(r.dev_pv, 0.50375, max_relative = 1e-14);
        assert!(!r.is_spe);

        let r = trigger_report(&p0(), 0.6, 0.5).unwrap();
        assert_relative_eq!(r.coop_pv, 0.625, max_relative = 1e-14);
        assert_relative_eq!(r.dev_pv, 0.58375, max_relative = 1e-14);
        assert!(r.is_spe);

        let r = trigger_report(&p0(), 25.0 / 49.0, 0.5).unwrap();
        assert_relative_eq!(r.coop_pv, 49.0 / 96.0, max_relative = 1e-14);
        assert_relative_eq!(r.dev_pv, 49.0 / 96.0, max_relative = 1e-14);
        assert!(r.is_spe);
    }

    #[test]
    fn trigger_report_rejects_bad_delta() {
        assert!(matches!(trigger_report(&p0(), 1.0, 0.5), Err(Error::DeltaOutOfRange { .. })));
        assert!(matches!(trigger_report(&p0(), -0.1, 0.5), Err(Error::DeltaOutOfRange { .. })));
        assert!(matches!(trigger_report(&p0(), 0.5, 1.5), Err(Error::EffortOutOfRange { .. })));
    }

    #[test]
    fn quadratic_p0_quarter() {
        let q = sustainability_quadratic(&p0(), 0.25).unwrap();
        assert_relative_eq!(q.a, -1.03125, max_relative = 1e-14);
        assert_relative_eq!(q.b, 0.5625, max_relative = 1e-14);
        assert_relative_eq!(q.c, -0.07125, max_relative = 1e-14);
        assert_relative_eq!(q.sqrt_disc, 0.15, max_relative = 1e-14);
        assert_relative_eq!(q.discriminant.sqrt(), 0.15, max_relative = 1e-12);
        assert_relative_eq!(q.root_low, 0.2, max_relative = 1e-15);
        assert_relative_eq!(q.root_high, 19.0 / 55.0, max_relative = 1e-14);
        assert!(q.eval(q.root_high).abs() < 1e-15);
        assert!(q.eval(q.root_low).abs() < 1e-15);
    }

    #[test]
    fn quadratic_p1() {
        let q = sustainability_quadratic(&p1(), 0.3).unwrap();
        assert_relative_eq!(q.root_low, 2.0 / 7.0, max_relative = 1e-15);
        assert_relative_eq!(q.sqrt_disc, 2.4 / 7.0, max_relative = 1e-14);
    }

    #[test]
    fn quadratic_small_delta_limit() {
        let q = sustainability_quadratic(&p0(), 1e-9).unwrap();
        assert!(q.root_high > 0.2);
        assert!(q.root_high - 0.2 < 1e-8);
    }

    #[test]
    fn quadratic_needs_interior_delta() {
        assert!(sustainability_quadratic(&p0(), 0.0).is_err());
        assert!(sustainability_quadratic(&p0(), 1.0).is_err());
    }

    #[test]
    fn max_sustainable_effort_branches() {
        let (x, b) = max_sustainable_effort_with_branch(&p0(), 0.25).unwrap();
        assert_relative_eq!(x, 19.0 / 55.0, max_relative = 1e-14);
        assert_eq!(b, SustainBranch::QuadraticRoot);
        assert_eq!(
            max_sustainable_effort_with_branch(&p0(), 0.6).unwrap(),
            (0.5, SustainBranch::FullCooperation)
        );
        assert_eq!(
            max_sustainable_effort_with_branch(&p0(), 0.0).unwrap(),
            (0.2, SustainBranch::OneShotNash)
        );
        let at_threshold = max_sustainable_effort(&p0(), critical_delta(&p0())).unwrap();
        assert_eq!(at_threshold, 0.5);
        assert!(max_sustainable_effort(&p0(), 1.0).is_err());
    }

    #[test]
    fn corollary_limit_examples() {
        let l = corollary_limits(&p0());
        assert_relative_eq!(l.at_zero, 0.2, max_relative = 1e-15);
        assert_relative_eq!(l.at_critical, 0.5, max_relative = 1e-14);
        let l = corollary_limits(&p1());
        assert_relative_eq!(l.at_zero, 2.0 / 7.0, max_relative = 1e-15);
        assert_relative_eq!(l.at_critical, 2.0 / 3.0, max_relative = 1e-14);
        let l = corollary_limits(&GameParams::unchecked(1.0, 0.0, 1.5));
        assert_relative_eq!(l.at_zero, 1.0 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(l.at_critical, 1.0 / 3.0, max_relative = 1e-14);
    }
}
