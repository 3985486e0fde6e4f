//! The one-period partnership game.
//!
//! Two partners choose efforts `x1, x2` in `[0, alpha]`. The project profit
//! `alpha * (x1 + x2 + c1 * x1 * x2)` is split equally and each partner pays a
//! private quadratic cost `c2 * xi^2`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Lower end of the admissible cost coefficient range.
pub const C2_MIN: f64 = 1.5;
/// Upper end of the admissible cost coefficient range.
pub const C2_MAX: f64 = 2.0;

/// Validated parameters `(alpha, c1, c2)` of one stage game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameParams {
    alpha: f64,
    c1: f64,
    c2: f64,
    #[serde(skip)]
    checked: bool,
}

impl GameParams {
    /// Builds parameters, enforcing `alpha > 0`, `0 <= c1 <= 2/alpha` and
    /// `3/2 <= c2 <= 2`.
    pub fn new(alpha: f64, c1: f64, c2: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::OutOfRange {
                field: "alpha",
                value: alpha,
                interval: "(0, inf)".into(),
            });
        }
        let c1_max = 2.0 / alpha;
        if !(0.0..=c1_max).contains(&c1) {
            return Err(Error::OutOfRange {
                field: "c1",
                value: c1,
                interval: format!("[0, {c1_max}]"),
            });
        }
        if !(C2_MIN..=C2_MAX).contains(&c2) {
            return Err(Error::OutOfRange {
                field: "c2",
                value: c2,
                interval: format!("[{C2_MIN}, {C2_MAX}]"),
            });
        }
        let params = Self { alpha, c1, c2, checked: true };
        // Implied by the ranges above; the absolute-maximum arguments rely on it.
        debug_assert!(params.l() >= 1.0 - 1e-12);
        Ok(params)
    }

    /// Builds parameters without range checks, for exploratory sweeps.
    ///
    /// Closed forms evaluated on such parameters need not be maxima; every
    /// report derived from them carries an `unchecked` flag.
    pub fn unchecked(alpha: f64, c1: f64, c2: f64) -> Self {
        Self { alpha, c1, c2, checked: false }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// `true` if the parameters were built through [`GameParams::new`].
    pub fn is_checked(&self) -> bool {
        self.checked
    }

    /// `l = 2 c2 - alpha c1`, the denominator of the optimal effort.
    pub fn l(&self) -> f64 {
        2.0 * self.c2 - self.alpha * self.c1
    }

    /// `K = 4 c2 - alpha c1`, the denominator of the Nash effort.
    pub fn k(&self) -> f64 {
        4.0 * self.c2 - self.alpha * self.c1
    }

    pub(crate) fn check_effort(&self, x: f64) -> Result<f64> {
        if (0.0..=self.alpha).contains(&x) {
            Ok(x)
        } else {
            Err(Error::EffortOutOfRange { value: x, alpha: self.alpha })
        }
    }
}

/// A pair of efforts, one per partner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EffortProfile {
    pub x1: f64,
    pub x2: f64,
}

impl EffortProfile {
    pub fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn symmetric(x: f64) -> Self {
        Self { x1: x, x2: x }
    }

    pub fn swapped(&self) -> Self {
        Self { x1: self.x2, x2: self.x1 }
    }
}

/// Per-period payoffs of both partners.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StagePayoffs {
    pub u1: f64,
    pub u2: f64,
}

impl StagePayoffs {
    pub fn total(&self) -> f64 {
        self.u1 + self.u2
    }
}

/// Payoff of the partner exerting `own` while the other exerts `other`.
///
/// No range check; callers validate.
#[inline]
pub(crate) fn payoff_of(params: &GameParams, own: f64, other: f64) -> f64 {
    let a = params.alpha;
    a * ((own + other) / 2.0 + params.c1 * (own * other) / 2.0) - params.c2 * own * own
}

/// Evaluates both partners' stage payoffs at `profile`.
pub fn stage_payoff(params: &GameParams, profile: EffortProfile) -> Result<StagePayoffs> {
    params.check_effort(profile.x1)?;
    params.check_effort(profile.x2)?;
    Ok(StagePayoffs {
        u1: payoff_of(params, profile.x1, profile.x2),
        u2: payoff_of(params, profile.x2, profile.x1),
    })
}

/// Joint surplus `alpha (x1 + x2) + alpha c1 x1 x2 - c2 (x1^2 + x2^2)`.
pub fn joint_surplus(params: &GameParams, profile: EffortProfile) -> Result<f64> {
    params.check_effort(profile.x1)?;
    params.check_effort(profile.x2)?;
    Ok(joint_surplus_of(params, profile.x1, profile.x2))
}

#[inline]
pub(crate) fn joint_surplus_of(params: &GameParams, x1: f64, x2: f64) -> f64 {
    let a = params.alpha;
    a * (x1 + x2) + a * params.c1 * x1 * x2 - params.c2 * (x1 * x1 + x2 * x2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p0() -> GameParams {
        GameParams::new(1.0, 1.0, 1.5).unwrap()
    }

    #[test]
    fn validates_reference_params() {
        let p = p0();
        assert!(p.is_checked());
        assert_eq!(p.l(), 2.0);
        assert_eq!(p.k(), 5.0);
    }

    #[test]
    fn rejects_c1_above_bound() {
        match GameParams::new(1.0, 3.0, 1.5) {
            Err(Error::OutOfRange { field, .. }) => assert_eq!(field, "c1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_c2_below_bound() {
        let err = GameParams::new(2.0, 0.5, 1.0).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { field: "c2", .. }));
        assert!(err.to_string().contains("c2 out of range [1.5, 2]"));
    }

    #[test]
    fn rejects_nonpositive_alpha() {
        for a in [0.0, -1.0, f64::NAN] {
            assert!(matches!(
                GameParams::new(a, 0.0, 1.5),
                Err(Error::OutOfRange { field: "alpha", .. })
            ));
        }
    }

    #[test]
    fn boundary_values_are_admissible() {
        assert!(GameParams::new(2.0, 1.0, 1.5).is_ok());
        assert!(GameParams::new(2.0, 0.0, 2.0).is_ok());
        assert!(!GameParams::unchecked(2.0, 0.0, 1.0).is_checked());
    }

    #[test]
    fn stage_payoff_examples() {
        let p = p0();
        let zero = stage_payoff(&p, EffortProfile::new(0.0, 0.0)).unwrap();
        assert_eq!((zero.u1, zero.u2), (0.0, 0.0));

        let nash = stage_payoff(&p, EffortProfile::symmetric(0.2)).unwrap();
        assert_relative_eq!(nash.u1, 0.16, max_relative = 1e-14);
        assert_relative_eq!(nash.u2, 0.16, max_relative = 1e-14);

        let dev = stage_payoff(&p, EffortProfile::new(0.5, 0.25)).unwrap();
        assert_relative_eq!(dev.u1, 0.0625, max_relative = 1e-14);
        assert_relative_eq!(dev.u2, 0.34375, max_relative = 1e-14);
    }

    #[test]
    fn effort_outside_box_is_rejected() {
        let p = p0();
        assert!(matches!(
            stage_payoff(&p, EffortProfile::new(1.5, 0.0)),
            Err(Error::EffortOutOfRange { .. })
        ));
        assert!(joint_surplus(&p, EffortProfile::new(0.0, -0.1)).is_err());
        // Corners are legal.
        assert!(joint_surplus(&p, EffortProfile::new(1.0, 1.0)).is_ok());
    }

    #[test]
    fn joint_surplus_examples() {
        let p = p0();
        assert_eq!(joint_surplus(&p, EffortProfile::new(0.0, 0.0)).unwrap(), 0.0);
        assert_relative_eq!(
            joint_surplus(&p, EffortProfile::symmetric(0.5)).unwrap(),
            0.5,
            max_relative = 1e-14
        );
        let p1 = GameParams::new(2.0, 0.5, 2.0).unwrap();
        assert_relative_eq!(
            joint_surplus(&p1, EffortProfile::symmetric(2.0)).unwrap(),
            -4.0,
            max_relative = 1e-14
        );
    }
}
