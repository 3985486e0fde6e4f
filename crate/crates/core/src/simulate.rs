//! Repeated-game engine: strategies, play traces, discounted values and a
//! one-shot-deviation scanner.

use serde::Serialize;

use crate::equilibrium::{nash_effort, nash_payoff};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{payoff_of, stage_payoff, EffortProfile, GameParams, StagePayoffs};
use crate::numeric::maximize_unimodal;
use crate::trigger::check_delta;

/// Default deviation-detection tolerance, relative to `alpha`.
pub const DEFAULT_MATCH_TOL: f64 = 1e-9;

/// Number of simulated periods used when checking PVs against closed forms.
pub const EQUIVALENCE_HORIZON: usize = 64;

/// Record of play; period `t` (1-based) is stored at index `t - 1`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct History {
    profiles: Vec<EffortProfile>,
    payoffs: Vec<StagePayoffs>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a history from profiles, computing the payoffs.
    pub fn from_profiles(params: &GameParams, profiles: &[EffortProfile]) -> Result<Self> {
        let mut h = Self::new();
        for &p in profiles {
            h.push(params, p)?;
        }
        Ok(h)
    }

    pub fn push(&mut self, params: &GameParams, profile: EffortProfile) -> Result<()> {
        let payoffs = stage_payoff(params, profile)?;
        self.profiles.push(profile);
        self.payoffs.push(payoffs);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    /// The next period to be played.
    pub fn next_period(&self) -> usize {
        self.len() + 1
    }

    pub fn profiles(&self) -> &[EffortProfile] {
        &self.profiles
    }

    pub fn payoffs(&self) -> &[StagePayoffs] {
        &self.payoffs
    }

    pub fn player_payoffs(&self, player: Player) -> Vec<f64> {
        self.payoffs
            .iter()
            .map(|p| match player {
                Player::One => p.u1,
                Player::Two => p.u2,
            })
            .collect()
    }

    /// `true` if the stored payoffs are exactly those recomputed from the
    /// stored profiles.
    pub fn is_consistent(&self, params: &GameParams) -> bool {
        self.profiles
            .iter()
            .zip(&self.payoffs)
            .all(|(&pr, &pay)| stage_payoff(params, pr).is_ok_and(|p| p == pay))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Player {
    One,
    Two,
}

/// A pure strategy of the repeated game: an effort as a function of the
/// public history.
pub trait Strategy: Sync {
    fn effort(&self, history: &History) -> f64;
}

impl<F> Strategy for F
where
    F: Fn(&History) -> f64 + Sync,
{
    fn effort(&self, history: &History) -> f64 {
        self(history)
    }
}

/// Grim trigger: play `target_effort` while every past profile was
/// `(target, target)`, otherwise `punishment_effort` forever.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriggerSpec {
    pub target_effort: f64,
    pub punishment_effort: f64,
    pub tolerance: f64,
}

impl TriggerSpec {
    pub fn new(target_effort: f64, punishment_effort: f64, tolerance: f64) -> Self {
        Self { target_effort, punishment_effort, tolerance }
    }

    /// Trigger at `target` with Nash reversion and the default tolerance.
    pub fn nash_reversion(params: &GameParams, target: f64) -> Self {
        Self::new(target, nash_effort(params), DEFAULT_MATCH_TOL * params.alpha())
    }

    pub fn validate(&self, params: &GameParams) -> Result<()> {
        params.check_effort(self.target_effort)?;
        params.check_effort(self.punishment_effort)?;
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "trigger tolerance must be non-negative, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Effort prescribed by a grim-trigger strategy after `history`.
pub fn trigger_action(spec: &TriggerSpec, history: &History) -> f64 {
    let on_path = history.profiles().iter().all(|p| {
        (p.x1 - spec.target_effort).abs() <= spec.tolerance
            && (p.x2 - spec.target_effort).abs() <= spec.tolerance
    });
    if on_path {
        spec.target_effort
    } else {
        spec.punishment_effort
    }
}

impl Strategy for TriggerSpec {
    fn effort(&self, history: &History) -> f64 {
        trigger_action(self, history)
    }
}

/// Always the same effort.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl Strategy for Constant {
    fn effort(&self, _: &History) -> f64 {
        self.0
    }
}

/// Plays `effort` in period `period` and follows `base` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviateAt<S> {
    pub period: usize,
    pub effort: f64,
    pub base: S,
}

impl<S: Strategy> Strategy for DeviateAt<S> {
    fn effort(&self, history: &History) -> f64 {
        if history.next_period() == self.period {
            self.effort
        } else {
            self.base.effort(history)
        }
    }
}

fn checked_effort(params: &GameParams, x: f64, player: usize, period: usize) -> Result<f64> {
    if (0.0..=params.alpha()).contains(&x) {
        Ok(x)
    } else {
        Err(Error::StrategyReturnedOutOfRange { player, period, value: x, alpha: params.alpha() })
    }
}

/// Plays `periods` simultaneous-move rounds; both strategies see the same
/// pre-period history.
pub fn play(
    params: &GameParams,
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    periods: usize,
) -> Result<History> {
    if periods == 0 {
        return Err(Error::InvalidArgument("periods must be at least 1".into()));
    }
    let mut history = History::new();
    extend_play(params, s1, s2, &mut history, periods)?;
    Ok(history)
}

fn extend_play(
    params: &GameParams,
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    history: &mut History,
    periods: usize,
) -> Result<()> {
    for _ in 0..periods {
        let t = history.next_period();
        let x1 = checked_effort(params, s1.effort(history), 1, t)?;
        let x2 = checked_effort(params, s2.effort(history), 2, t)?;
        history.push(params, EffortProfile::new(x1, x2))?;
    }
    Ok(())
}

/// `sum_t delta^(t-1) u_t` plus, if given, a constant tail
/// `delta^T tail / (1 - delta)` for all periods after the list.
pub fn discounted_value(per_period: &[f64], delta: f64, tail: Option<f64>) -> Result<f64> {
    check_delta(delta)?;
    let mut weight = 1.0;
    let mut total = 0.0;
    for &u in per_period {
        total += weight * u;
        weight *= delta;
    }
    if let Some(c) = tail {
        total += weight * c / (1.0 - delta);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    None,
    ConstantTail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlayOutcome {
    pub history: History,
    pub pv1: f64,
    pub pv2: f64,
    pub horizon: usize,
    pub tail_mode: TailMode,
}

/// Plays `periods` rounds and discounts them.
///
/// With `TailMode::ConstantTail` one extra round is played and its payoffs
/// are assumed to repeat forever; this is exact when both strategies are
/// stationary after the horizon, as grim trigger is once no further scripted
/// deviations remain.
pub fn play_discounted(
    params: &GameParams,
    s1: &dyn Strategy,
    s2: &dyn Strategy,
    periods: usize,
    delta: f64,
    tail_mode: TailMode,
) -> Result<PlayOutcome> {
    check_delta(delta)?;
    let history = play(params, s1, s2, periods)?;
    let tail = match tail_mode {
        TailMode::None => None,
        TailMode::ConstantTail => {
            let mut probe = history.clone();
            extend_play(params, s1, s2, &mut probe, 1)?;
            probe.payoffs().last().copied()
        }
    };
    let pv1 = discounted_value(&history.player_payoffs(Player::One), delta, tail.map(|p| p.u1))?;
    let pv2 = discounted_value(&history.player_payoffs(Player::Two), delta, tail.map(|p| p.u2))?;
    Ok(PlayOutcome { history, pv1, pv2, horizon: periods, tail_mode })
}

/// Result of a one-shot deviation search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationScan {
    pub best_effort: f64,
    pub best_gain: f64,
}

/// Searches first-period deviations from grim-trigger cooperation at `x_bar`.
///
/// Every candidate effort is treated as a deviation followed by Nash
/// reversion. The gain is its PV minus the cooperation PV. A uniform grid on
/// `[0, alpha]` is refined by one golden-section pass around the best point.
pub fn one_shot_deviation_scan(
    params: &GameParams,
    delta: f64,
    x_bar: f64,
    grid_points: usize,
) -> Result<DeviationScan> {
    one_shot_deviation_scan_with(params, delta, x_bar, grid_points, Execution::default())
}

pub fn one_shot_deviation_scan_with(
    params: &GameParams,
    delta: f64,
    x_bar: f64,
    grid_points: usize,
    exec: Execution,
) -> Result<DeviationScan> {
    check_delta(delta)?;
    params.check_effort(x_bar)?;
    if grid_points < 2 {
        return Err(Error::InvalidArgument(format!("grid_points must be at least 2, got {grid_points}")));
    }
    let alpha = params.alpha();
    let coop_stream = [payoff_of(params, x_bar, x_bar)];
    let coop_pv = discounted_value(&coop_stream, delta, Some(coop_stream[0]))?;
    let punishment = nash_payoff(params);
    let gain = |y: f64| -> f64 {
        let dev = payoff_of(params, y, x_bar);
        dev + delta * punishment / (1.0 - delta) - coop_pv
    };

    let step = alpha / (grid_points - 1) as f64;
    let grid_x = |i: usize| if i + 1 == grid_points { alpha } else { i as f64 * step };
    let gains = exec.map_range(grid_points, |i| gain(grid_x(i)));

    // First maximum wins, so the result is independent of evaluation order.
    let (best_i, mut best_gain) = gains
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
    let mut best_effort = grid_x(best_i);

    let lo = grid_x(best_i.saturating_sub(1));
    let hi = grid_x((best_i + 1).min(grid_points - 1));
    let tol = (1e-9 * alpha).min((hi - lo) / 2.0);
    if let Ok(refined) = maximize_unimodal(gain, lo, hi, tol) {
        let g = gain(refined.value);
        if g > best_gain {
            best_gain = g;
            best_effort = refined.value;
        }
    }
    Ok(DeviationScan { best_effort, best_gain })
}
