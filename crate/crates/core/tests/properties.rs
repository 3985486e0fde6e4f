use partnership::equilibrium::{
    best_response_closed, nash_effort, nash_payoff, optimal_effort, optimal_payoff, second_order_certificate,
};
use partnership::model::{joint_surplus, stage_payoff};
use partnership::numeric::{best_response_iterates, best_response_numeric, quadratic_roots_numeric};
use partnership::simulate::{play, DeviateAt, History, TriggerSpec};
use partnership::trigger::{
    critical_delta, deviation_stage_payoff, max_sustainable_effort, sustainability_quadratic, trigger_report,
};
use partnership::{EffortProfile, GameParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = GameParams> {
    (0.25f64..4.0, 0.0f64..=1.0, 1.5f64..=2.0)
        .prop_map(|(alpha, u, c2)| GameParams::new(alpha, (u * 2.0 / alpha).min(2.0 / alpha), c2).unwrap())
}

/// Parameters together with two efforts in `[0, alpha]`.
fn params_and_profile() -> impl Strategy<Value = (GameParams, f64, f64)> {
    (params(), 0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(p, a, b)| (p, a * p.alpha(), b * p.alpha()))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn payoff_symmetry((p, a, b) in params_and_profile()) {
        let ab = stage_payoff(&p, EffortProfile::new(a, b)).unwrap();
        let ba = stage_payoff(&p, EffortProfile::new(b, a)).unwrap();
        prop_assert_eq!(ab.u1, ba.u2);
        prop_assert_eq!(ab.u2, ba.u1);
    }

    #[test]
    fn surplus_is_sum_of_payoffs((p, a, b) in params_and_profile()) {
        let s = stage_payoff(&p, EffortProfile::new(a, b)).unwrap();
        let total = joint_surplus(&p, EffortProfile::new(a, b)).unwrap();
        prop_assert!((total - s.total()).abs() <= 1e-14 * total.abs().max(p.alpha() * p.alpha()));
    }

    #[test]
    fn own_effort_concavity((p, x0, other) in params_and_profile(), frac in 0.001f64..0.5) {
        let h = frac * p.alpha() / 2.0;
        let x = x0.clamp(h, p.alpha() - 2.0 * h);
        let u = |y: f64| stage_payoff(&p, EffortProfile::new(y, other)).unwrap().u1;
        let second = u(x + h) - 2.0 * u(x) + u(x - h);
        let expected = -2.0 * p.c2() * h * h;
        prop_assert!(second <= expected + 1e-9 * expected.abs().max(1e-12) + 1e-13);
    }

    #[test]
    fn decoupled_cross_term((p, x, a) in params_and_profile(), b in 0.0f64..=1.0) {
        let p = GameParams::new(p.alpha(), 0.0, p.c2()).unwrap();
        let b = b * p.alpha();
        let ua = stage_payoff(&p, EffortProfile::new(x, a)).unwrap().u1;
        let ub = stage_payoff(&p, EffortProfile::new(x, b)).unwrap().u1;
        prop_assert!(((ua - ub) - p.alpha() * (a - b) / 2.0).abs() <= 1e-12 * p.alpha() * p.alpha());
    }

    #[test]
    fn nash_is_fixed_point(p in params()) {
        let x = nash_effort(&p);
        prop_assert!((best_response_closed(&p, x).unwrap() - x).abs() <= 1e-12 * p.alpha());
    }

    #[test]
    fn best_response_matches_golden_section((p, x, _) in params_and_profile()) {
        let closed = best_response_closed(&p, x).unwrap();
        let numeric = best_response_numeric(&p, x, 1e-8).unwrap();
        prop_assert!((closed - numeric).abs() <= 1e-6 * p.alpha());
        prop_assert!(closed > 0.0 && closed <= p.alpha() / 2.0 + 1e-15);
    }

    #[test]
    fn first_order_condition((p, x, _) in params_and_profile()) {
        let br = best_response_closed(&p, x).unwrap();
        let h = 1e-6 * p.alpha();
        let u = |y: f64| stage_payoff(&p, EffortProfile::new(y, x)).unwrap().u1;
        let slope = (u(br + h) - u(br - h)) / (2.0 * h);
        prop_assert!(slope.abs() <= 1e-6 * p.alpha().max(1.0));
    }

    #[test]
    fn ordering_and_dominance(p in params()) {
        let (xs, xh, a) = (nash_effort(&p), optimal_effort(&p), p.alpha());
        prop_assert!(xs < xh && xh <= a);
        prop_assert!(nash_payoff(&p) < optimal_payoff(&p));
        let at_hat = joint_surplus(&p, EffortProfile::symmetric(xh)).unwrap();
        prop_assert!(at_hat >= joint_surplus(&p, EffortProfile::symmetric(a)).unwrap() - 1e-12);
        prop_assert!(at_hat >= 0.0);
        prop_assert!(second_order_certificate(&p).hessian_det > 0.0);
    }

    #[test]
    fn contraction_of_best_response_iteration(p in params()) {
        let bound = p.alpha() * p.c1() / (4.0 * p.c2()) + 1e-12;
        let xs: Vec<f64> = best_response_iterates(&p).take(30).collect();
        for w in xs.windows(3) {
            let (d0, d1) = ((w[1] - w[0]).abs(), (w[2] - w[1]).abs());
            prop_assert!(d1 <= bound * d0 + 1e-15);
        }
    }

    #[test]
    fn critical_delta_range(p in params()) {
        let ds = critical_delta(&p);
        prop_assert!((0.5..1.0).contains(&ds));
    }

    #[test]
    fn threshold_equivalence(p in params(), u in 0.0f64..1.0) {
        let ds = critical_delta(&p);
        prop_assume!((u - ds).abs() > 1e-9);
        let r = trigger_report(&p, u, optimal_effort(&p)).unwrap();
        prop_assert_eq!(r.is_spe, u >= ds);
    }

    #[test]
    fn deviation_identity_and_dominance((p, x, _) in params_and_profile()) {
        let xh = optimal_effort(&p);
        let l = p.l();
        let gain = deviation_stage_payoff(&p, xh).unwrap() - optimal_payoff(&p);
        prop_assert!(close(gain, p.c2() * p.alpha() * p.alpha() / (4.0 * l * l), 1e-12));

        let dev = deviation_stage_payoff(&p, x).unwrap();
        let stay = stage_payoff(&p, EffortProfile::symmetric(x)).unwrap().u2;
        prop_assert!(dev >= stay - 1e-14);
        let corner = stage_payoff(&p, EffortProfile::new(x, p.alpha())).unwrap().u2;
        prop_assert!(dev >= corner - 1e-12 * dev.abs().max(1.0));
    }

    #[test]
    fn quadratic_structure(p in params(), u in 0.001f64..0.999) {
        let delta = u * critical_delta(&p);
        let q = sustainability_quadratic(&p, delta).unwrap();
        prop_assert!(q.a < 0.0 && q.b > 0.0 && q.c < 0.0);
        prop_assert!(close(q.root_low, nash_effort(&p), 1e-9));
        prop_assert!(close(q.discriminant.sqrt(), q.sqrt_disc, 1e-8));
        prop_assert!(nash_effort(&p) < q.root_high && q.root_high < optimal_effort(&p));
        let (lo, hi) = quadratic_roots_numeric(q.a, q.b, q.c).unwrap();
        prop_assert!(close(lo, q.root_low, 1e-8) && close(hi, q.root_high, 1e-8));
    }

    #[test]
    fn sustainable_effort_is_monotone(p in params(), u in 0.0f64..0.99, v in 0.0f64..0.99) {
        let (d1, d2) = if u < v { (u, v) } else { (v, u) };
        let x1 = max_sustainable_effort(&p, d1).unwrap();
        let x2 = max_sustainable_effort(&p, d2).unwrap();
        prop_assert!(x1 <= x2);
        prop_assert!(nash_effort(&p) <= x1 && x2 <= optimal_effort(&p));
    }

    #[test]
    fn history_payoffs_recompute((p, a, b) in params_and_profile()) {
        let spec = TriggerSpec::nash_reversion(&p, a);
        let dev = DeviateAt { period: 2, effort: b, base: spec };
        let h: History = play(&p, &spec, &dev, 6).unwrap();
        prop_assert!(h.is_consistent(&p));
        let again = play(&p, &spec, &dev, 6).unwrap();
        prop_assert_eq!(h, again);
    }
}
