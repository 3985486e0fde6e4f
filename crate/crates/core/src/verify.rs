//! Randomised cross-checks of every closed form against an independent route:
//! numerical oracles, algebraic identities and the simulator.
//!
//! Parameter sets are drawn uniformly from the admissible box with a seeded
//! ChaCha generator, one independent stream per case, so a run is a pure
//! function of `(cases, seed)` regardless of evaluation order.

use std::fmt::{self, Write as _};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::equilibrium::{self, second_order_certificate};
use crate::error::Result;
use crate::exec::Execution;
use crate::model::{joint_surplus_of, payoff_of, GameParams, C2_MAX, C2_MIN};
use crate::numeric::{best_response_numeric, nash_fixed_point, quadratic_roots_numeric};
use crate::simulate::{
    one_shot_deviation_scan_with, play_discounted, DeviateAt, TailMode, TriggerSpec, EQUIVALENCE_HORIZON,
};
use crate::trigger::{self, SustainabilityQuadratic, TriggerReport};

/// Range of `alpha` used when sampling the parameter box.
pub const ALPHA_RANGE: (f64, f64) = (0.25, 4.0);

/// Seeded sampler over the admissible parameter box.
#[derive(Debug, Clone)]
pub struct Sampler(ChaCha8Rng);

impl Sampler {
    /// Independent stream `stream` of generator `seed`.
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    /// Uniform draw from `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.0.gen::<f64>()
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Admissible parameters: `alpha` in [`ALPHA_RANGE`], then `c1` uniform on
    /// `[0, 2/alpha]` and `c2` uniform on `[3/2, 2]`.
    pub fn params(&mut self) -> GameParams {
        let alpha = self.uniform(ALPHA_RANGE.0, ALPHA_RANGE.1);
        let c1 = (self.unit() * 2.0 / alpha).min(2.0 / alpha);
        let c2 = self.uniform(C2_MIN, C2_MAX);
        GameParams::new(alpha, c1, c2).expect("sampled parameters lie in the admissible box")
    }
}

/// The closed forms under test. The default methods forward to the library;
/// overriding one lets a test confirm the suite catches a wrong formula.
pub trait ClosedForms: Sync {
    fn nash_effort(&self, p: &GameParams) -> f64 {
        equilibrium::nash_effort(p)
    }

    fn nash_payoff(&self, p: &GameParams) -> f64 {
        equilibrium::nash_payoff(p)
    }

    fn optimal_effort(&self, p: &GameParams) -> f64 {
        equilibrium::optimal_effort(p)
    }

    fn optimal_payoff(&self, p: &GameParams) -> f64 {
        equilibrium::optimal_payoff(p)
    }

    fn best_response(&self, p: &GameParams, x_other: f64) -> Result<f64> {
        equilibrium::best_response_closed(p, x_other)
    }

    fn critical_delta(&self, p: &GameParams) -> f64 {
        trigger::critical_delta(p)
    }

    fn deviation_stage_payoff(&self, p: &GameParams, x_bar: f64) -> Result<f64> {
        trigger::deviation_stage_payoff(p, x_bar)
    }

    fn trigger_report(&self, p: &GameParams, delta: f64, x_bar: f64) -> Result<TriggerReport> {
        trigger::trigger_report(p, delta, x_bar)
    }

    fn sustainability_quadratic(&self, p: &GameParams, delta: f64) -> Result<SustainabilityQuadratic> {
        trigger::sustainability_quadratic(p, delta)
    }

    fn max_sustainable_effort(&self, p: &GameParams, delta: f64) -> Result<f64> {
        trigger::max_sustainable_effort(p, delta)
    }
}

/// The library's own closed forms.
#[derive(Debug, Clone, Copy, Default)]
pub struct Reference;

impl ClosedForms for Reference {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub cases: usize,
    pub seed: u64,
    /// Points per one-shot deviation scan.
    pub scan_grid: usize,
    /// Points in the discount-factor grid of the threshold check.
    pub delta_grid: usize,
}

impl VerifyConfig {
    pub fn new(cases: usize, seed: u64) -> Self {
        Self { cases, seed, scan_grid: 1001, delta_grid: 50 }
    }
}

/// Names of all checks, in transcript order.
pub const CHECKS: &[&str] = &[
    "best_response_vs_golden_section",
    "nash_vs_fixed_point",
    "nash_fixed_point_identity",
    "effort_ordering",
    "boundary_dominance",
    "second_order_conditions",
    "critical_delta_range",
    "threshold_equivalence",
    "deviation_identity",
    "deviation_dominance",
    "corner_dominance",
    "quadratic_roots",
    "quadratic_sandwich",
    "quadratic_indifference",
    "corollary_limits",
    "simulation_agreement",
    "deviation_scan",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub check: &'static str,
    pub case: usize,
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub detail: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} failed at case {} (alpha={}, c1={}, c2={}): {}",
            self.check, self.case, self.alpha, self.c1, self.c2, self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckTally {
    pub name: &'static str,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub cases: usize,
    pub seed: u64,
    pub checks: Vec<CheckTally>,
    pub first_failure: Option<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.failed).sum()
    }

    /// Deterministic multi-line summary.
    pub fn transcript(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.failed == 0 { "ok" } else { "FAIL" };
            let _ = writeln!(out, "{:<34} {:>4}  failed {}/{}", c.name, status, c.failed, self.cases);
        }
        let _ = writeln!(out, "{}", self.summary());
        if let Some(ce) = &self.first_failure {
            let _ = writeln!(out, "first counterexample: {ce}");
        }
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "verify: {} cases, seed {}, {} checks, {} failures: {}",
            self.cases,
            self.seed,
            self.checks.len(),
            self.failures(),
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

type CheckResult = std::result::Result<(), String>;

fn ensure(cond: bool, detail: impl FnOnce() -> String) -> CheckResult {
    if cond {
        Ok(())
    } else {
        Err(detail())
    }
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn err_str(e: crate::Error) -> String {
    e.to_string()
}

struct Case<'a, F: ClosedForms + ?Sized> {
    forms: &'a F,
    p: GameParams,
    sampler: Sampler,
    config: VerifyConfig,
}

impl<F: ClosedForms + ?Sized> Case<'_, F> {
    fn run(&mut self, name: &str) -> CheckResult {
        match name {
            "best_response_vs_golden_section" => self.best_response_vs_golden_section(),
            "nash_vs_fixed_point" => self.nash_vs_fixed_point(),
            "nash_fixed_point_identity" => self.nash_fixed_point_identity(),
            "effort_ordering" => self.effort_ordering(),
            "boundary_dominance" => self.boundary_dominance(),
            "second_order_conditions" => self.second_order_conditions(),
            "critical_delta_range" => self.critical_delta_range(),
            "threshold_equivalence" => self.threshold_equivalence(),
            "deviation_identity" => self.deviation_identity(),
            "deviation_dominance" => self.deviation_dominance(),
            "corner_dominance" => self.corner_dominance(),
            "quadratic_roots" => self.quadratic_roots(),
            "quadratic_sandwich" => self.quadratic_sandwich(),
            "quadratic_indifference" => self.quadratic_indifference(),
            "corollary_limits" => self.corollary_limits(),
            "simulation_agreement" => self.simulation_agreement(),
            "deviation_scan" => self.deviation_scan(),
            other => Err(format!("unknown check {other}")),
        }
    }

    /// A discount factor strictly inside `(0, delta*)`, away from both ends.
    fn interior_delta(&mut self) -> f64 {
        let ds = self.forms.critical_delta(&self.p);
        ds * self.sampler.uniform(0.001, 0.999)
    }

    fn best_response_vs_golden_section(&mut self) -> CheckResult {
        let p = self.p;
        let x = self.sampler.uniform(0.0, p.alpha());
        let closed = self.forms.best_response(&p, x).map_err(err_str)?;
        let numeric = best_response_numeric(&p, x, 1e-8).map_err(err_str)?;
        ensure((closed - numeric).abs() <= 1e-6 * p.alpha(), || {
            format!("x_other={x}: closed {closed} vs golden-section {numeric}")
        })
    }

    fn nash_vs_fixed_point(&mut self) -> CheckResult {
        let x_star = self.forms.nash_effort(&self.p);
        let fp = nash_fixed_point(&self.p, 1e-13, 100).map_err(err_str)?;
        ensure((x_star - fp.value).abs() <= 1e-10, || {
            format!("closed {x_star} vs fixed point {}", fp.value)
        })
    }

    fn nash_fixed_point_identity(&mut self) -> CheckResult {
        let x_star = self.forms.nash_effort(&self.p);
        let br = self.forms.best_response(&self.p, x_star).map_err(err_str)?;
        ensure((br - x_star).abs() <= 1e-12 * self.p.alpha(), || format!("B(x*)={br} vs x*={x_star}"))
    }

    fn effort_ordering(&mut self) -> CheckResult {
        let p = self.p;
        let (xs, xh) = (self.forms.nash_effort(&p), self.forms.optimal_effort(&p));
        ensure(xs < xh && xh <= p.alpha() * (1.0 + 1e-15), || format!("x*={xs}, x_hat={xh}, alpha={}", p.alpha()))?;
        let (us, uh) = (self.forms.nash_payoff(&p), self.forms.optimal_payoff(&p));
        ensure(us < uh, || format!("u*={us} not below u_hat={uh}"))?;
        ensure(rel_close(us, payoff_of(&p, xs, xs), 1e-12), || format!("u*={us} vs payoff at x*"))?;
        ensure(rel_close(uh, payoff_of(&p, xh, xh), 1e-12), || format!("u_hat={uh} vs payoff at x_hat"))
    }

    fn boundary_dominance(&mut self) -> CheckResult {
        let p = self.p;
        let a = p.alpha();
        let xh = self.forms.optimal_effort(&p);
        let at_hat = joint_surplus_of(&p, xh, xh);
        let at_corner = joint_surplus_of(&p, a, a);
        let tol = 1e-12 * at_hat.abs().max(1.0);
        ensure(at_hat >= at_corner - tol && at_hat >= -tol, || {
            format!("u(x_hat)={at_hat}, u(alpha,alpha)={at_corner}")
        })?;
        // The interior point also beats a random interior profile.
        let (y1, y2) = (self.sampler.uniform(0.0, a), self.sampler.uniform(0.0, a));
        ensure(at_hat >= joint_surplus_of(&p, y1, y2) - tol, || format!("u({y1},{y2}) exceeds u(x_hat)"))
    }

    fn second_order_conditions(&mut self) -> CheckResult {
        let cert = second_order_certificate(&self.p);
        ensure(cert.concave && cert.hessian_det > 0.0, || format!("{cert:?}"))
    }

    fn critical_delta_range(&mut self) -> CheckResult {
        let p = self.p;
        let ds = self.forms.critical_delta(&p);
        ensure((0.5..1.0).contains(&ds), || format!("delta*={ds} outside [1/2, 1)"))?;
        // K^2 - 8 c2 l = (alpha c1)^2, so delta* = 1/2 exactly when alpha c1 = 0.
        let k = p.k();
        let lhs = k * k - 8.0 * p.c2() * p.l();
        let ac1 = p.alpha() * p.c1();
        ensure((lhs - ac1 * ac1).abs() <= 1e-12 * k * k, || format!("K^2 - 8 c2 l = {lhs} vs (alpha c1)^2 = {}", ac1 * ac1))
    }

    fn delta_grid(&self, ds: f64) -> Vec<f64> {
        let n = self.config.delta_grid.max(3);
        let mut grid: Vec<f64> = (0..n - 2).map(|i| (i as f64 + 0.5) / (n - 2) as f64).collect();
        grid.push(ds);
        grid.push(ds * (1.0 - 1e-7));
        grid
    }

    fn threshold_equivalence(&mut self) -> CheckResult {
        let p = self.p;
        let ds = self.forms.critical_delta(&p);
        let xh = self.forms.optimal_effort(&p);
        for delta in self.delta_grid(ds) {
            if (delta - ds).abs() <= 1e-9 {
                continue;
            }
            let r = self.forms.trigger_report(&p, delta, xh).map_err(err_str)?;
            ensure(r.is_spe == (delta >= ds), || {
                format!("delta={delta}, delta*={ds}: is_spe={} (coop {} vs dev {})", r.is_spe, r.coop_pv, r.dev_pv)
            })?;
        }
        Ok(())
    }

    fn deviation_identity(&mut self) -> CheckResult {
        let p = self.p;
        let xh = self.forms.optimal_effort(&p);
        let gap = self.forms.deviation_stage_payoff(&p, xh).map_err(err_str)? - self.forms.optimal_payoff(&p);
        let l = p.l();
        let expected = p.c2() * p.alpha() * p.alpha() / (4.0 * l * l);
        ensure(rel_close(gap, expected, 1e-10), || format!("deviation gain {gap} vs c2 alpha^2/(4 l^2) = {expected}"))
    }

    fn deviation_dominance(&mut self) -> CheckResult {
        let p = self.p;
        let x = self.sampler.uniform(0.0, p.alpha());
        let dev = self.forms.deviation_stage_payoff(&p, x).map_err(err_str)?;
        let stay = payoff_of(&p, x, x);
        ensure(dev >= stay - 1e-14 * stay.abs().max(1.0), || format!("x_bar={x}: deviation {dev} < cooperation {stay}"))?;
        // The deviation payoff is the own-payoff maximum against x_bar.
        let br = self.forms.best_response(&p, x).map_err(err_str)?;
        ensure(rel_close(dev, payoff_of(&p, br, x), 1e-12), || format!("x_bar={x}: {dev} vs u(x_bar, B(x_bar))"))
    }

    fn corner_dominance(&mut self) -> CheckResult {
        let p = self.p;
        let a = p.alpha();
        let x = self.sampler.uniform(0.0, a);
        let dev = self.forms.deviation_stage_payoff(&p, x).map_err(err_str)?;
        let corner = payoff_of(&p, a, x);
        let zero = payoff_of(&p, 0.0, x);
        let tol = 1e-12 * dev.abs().max(1.0);
        ensure(dev >= corner - tol && dev >= zero - tol, || {
            format!("x_bar={x}: deviation {dev}, at alpha {corner}, at 0 {zero}")
        })
    }

    fn quadratic_roots(&mut self) -> CheckResult {
        let p = self.p;
        let delta = self.interior_delta();
        let q = self.forms.sustainability_quadratic(&p, delta).map_err(err_str)?;
        let x_star = self.forms.nash_effort(&p);
        ensure(rel_close(q.root_low, x_star, 1e-9), || format!("delta={delta}: root_low {} vs x* {x_star}", q.root_low))?;
        let expected_sqrt = 2.0 * p.alpha() * p.c2() * delta / p.k();
        ensure(rel_close(q.sqrt_disc, expected_sqrt, 1e-9), || format!("delta={delta}: sqrt_disc {}", q.sqrt_disc))?;
        ensure(rel_close(q.discriminant.max(0.0).sqrt(), q.sqrt_disc, 1e-8), || {
            format!("delta={delta}: sqrt(B^2-4AC) = {} vs {}", q.discriminant.max(0.0).sqrt(), q.sqrt_disc)
        })?;
        ensure(q.a < 0.0 && q.b > 0.0 && q.c < 0.0, || format!("delta={delta}: coefficient signs {q:?}"))?;
        let (lo, hi) = quadratic_roots_numeric(q.a, q.b, q.c).map_err(err_str)?;
        let x_bar = self.forms.max_sustainable_effort(&p, delta).map_err(err_str)?;
        ensure(rel_close(lo, q.root_low, 1e-8), || format!("delta={delta}: numeric low root {lo} vs {}", q.root_low))?;
        ensure(rel_close(hi, q.root_high, 1e-8) && rel_close(hi, x_bar, 1e-8), || {
            format!("delta={delta}: numeric high root {hi}, explicit {}, max sustainable {x_bar}", q.root_high)
        })
    }

    fn quadratic_sandwich(&mut self) -> CheckResult {
        let p = self.p;
        let ds = self.forms.critical_delta(&p);
        let (xs, xh) = (self.forms.nash_effort(&p), self.forms.optimal_effort(&p));
        let mut prev = xs;
        for i in 1..=20 {
            let delta = ds * i as f64 / 21.0;
            let x = self.forms.max_sustainable_effort(&p, delta).map_err(err_str)?;
            ensure(xs < x && x < xh, || format!("delta={delta}: x*={xs} < {x} < x_hat={xh} fails"))?;
            ensure(x > prev, || format!("delta={delta}: {x} not above previous {prev}"))?;
            prev = x;
        }
        Ok(())
    }

    fn quadratic_indifference(&mut self) -> CheckResult {
        let p = self.p;
        let delta = self.interior_delta();
        let x = self.forms.max_sustainable_effort(&p, delta).map_err(err_str)?;
        let r = self.forms.trigger_report(&p, delta, x).map_err(err_str)?;
        let scale = r.coop_pv.abs().max(1.0);
        ensure((r.coop_pv - r.dev_pv).abs() <= 1e-9 * scale, || {
            format!("delta={delta}, x_bar={x}: coop {} vs dev {}", r.coop_pv, r.dev_pv)
        })?;
        let above = (x + 1e-4 * p.alpha()).min(p.alpha());
        let r = self.forms.trigger_report(&p, delta, above).map_err(err_str)?;
        ensure(!r.is_spe, || format!("delta={delta}: target {above} above the maximum is still sustainable"))
    }

    fn corollary_limits(&mut self) -> CheckResult {
        let p = self.p;
        let (xs, xh) = (self.forms.nash_effort(&p), self.forms.optimal_effort(&p));
        let near_zero = self.forms.sustainability_quadratic(&p, 1e-8).map_err(err_str)?.root_high;
        ensure((near_zero - xs).abs() <= 1e-5 * p.alpha(), || format!("root at delta=1e-8: {near_zero} vs x*={xs}"))?;
        let ds = self.forms.critical_delta(&p);
        let at_critical = self.forms.sustainability_quadratic(&p, ds).map_err(err_str)?.root_high;
        ensure(rel_close(at_critical, xh, 1e-9), || format!("root at delta*: {at_critical} vs x_hat={xh}"))
    }

    fn simulation_agreement(&mut self) -> CheckResult {
        let p = self.p;
        let delta = self.sampler.uniform(0.0, 0.99);
        let x_bar = self.sampler.uniform(0.0, p.alpha());
        let r = self.forms.trigger_report(&p, delta, x_bar).map_err(err_str)?;
        let trigger = TriggerSpec::nash_reversion(&p, x_bar);
        let coop = play_discounted(&p, &trigger, &trigger, EQUIVALENCE_HORIZON, delta, TailMode::ConstantTail)
            .map_err(err_str)?;
        ensure(rel_close(coop.pv2, r.coop_pv, 1e-9), || {
            format!("delta={delta}, x_bar={x_bar}: simulated coop {} vs {}", coop.pv2, r.coop_pv)
        })?;
        let deviation = self.forms.best_response(&p, x_bar).map_err(err_str)?;
        let deviator = DeviateAt { period: 1, effort: deviation, base: trigger };
        let dev = play_discounted(&p, &trigger, &deviator, EQUIVALENCE_HORIZON, delta, TailMode::ConstantTail)
            .map_err(err_str)?;
        ensure(rel_close(dev.pv2, r.dev_pv, 1e-9), || {
            format!("delta={delta}, x_bar={x_bar}: simulated deviation {} vs {}", dev.pv2, r.dev_pv)
        })
    }

    fn deviation_scan(&mut self) -> CheckResult {
        let p = self.p;
        let ds = self.forms.critical_delta(&p);
        let xh = self.forms.optimal_effort(&p);
        let above = self.sampler.uniform(ds, 1.0).min(0.999_999);
        let s = one_shot_deviation_scan_with(&p, above, xh, self.config.scan_grid, Execution::Sequential)
            .map_err(err_str)?;
        ensure(s.best_gain <= 1e-8, || format!("delta={above} >= delta*={ds}: profitable deviation {s:?}"))?;
        let below = ds / 2.0;
        let s = one_shot_deviation_scan_with(&p, below, xh, self.config.scan_grid, Execution::Sequential)
            .map_err(err_str)?;
        ensure(s.best_gain > 0.0, || format!("delta={below} < delta*={ds}: no profitable deviation {s:?}"))
    }
}

/// Runs every check on `config.cases` sampled parameter sets.
pub fn run_verification<F: ClosedForms + ?Sized>(forms: &F, config: VerifyConfig, exec: Execution) -> VerifyReport {
    let per_case: Vec<Vec<Option<Counterexample>>> = exec.map_range(config.cases, |i| {
        let mut sampler = Sampler::new(config.seed, i as u64);
        let p = sampler.params();
        let mut case = Case { forms, p, sampler, config };
        CHECKS
            .iter()
            .map(|&name| {
                case.run(name).err().map(|detail| Counterexample {
                    check: name,
                    case: i,
                    alpha: p.alpha(),
                    c1: p.c1(),
                    c2: p.c2(),
                    detail,
                })
            })
            .collect()
    });

    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(j, &name)| CheckTally { name, failed: per_case.iter().filter(|c| c[j].is_some()).count() })
        .collect();
    let first_failure = per_case.into_iter().flatten().flatten().next();
    VerifyReport { cases: config.cases, seed: config.seed, checks, first_failure }
}
