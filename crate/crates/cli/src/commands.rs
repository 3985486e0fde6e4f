use std::io::Write;

use partnership::equilibrium::{nash_effort, optimal_effort, social_optimum};
use partnership::simulate::{
    one_shot_deviation_scan, play_discounted, DeviateAt, DeviationScan, Strategy, TailMode, TriggerSpec,
};
use partnership::trigger::{
    best_deviation_against, critical_delta, max_sustainable_effort_with_branch, sustainability_quadratic,
    trigger_report, SustainBranch, SustainabilityQuadratic, TriggerReport,
};
use partnership::verify::{run_verification, ClosedForms, Reference, VerifyConfig};
use partnership::{Execution, GameParams};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::grid::{Axis, SweepGrid};
use crate::report::{write_csv, ReportRow};
use crate::{Command, Format, ParamArgs};

pub fn dispatch(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match cmd {
        Command::Analyze { params, delta, format } => analyze(params, *delta, *format, out),
        Command::Threshold { params, format } => threshold(params, *format, out),
        Command::Sustain { params, delta, format } => sustain(params, *delta, *format, out),
        Command::Spe { params, delta, target, grid, format } => spe(params, *delta, target, *grid, *format, out),
        Command::Simulate { params, delta, periods, deviate_at, deviation, target, format } => simulate(
            params,
            &SimulateOptions { delta: *delta, periods: *periods, deviate_at: *deviate_at, deviation: *deviation, target },
            *format,
            out,
            err,
        ),
        Command::Sweep { alpha, c1, c2, delta, out: path, format } => {
            let grid = SweepGrid {
                alpha: Axis::parse(alpha, "alpha")?,
                c1: Axis::parse(c1, "c1")?,
                c2: Axis::parse(c2, "c2")?,
                delta: Axis::parse(delta, "delta")?,
            };
            sweep(&grid, path.as_deref(), *format, out, err)
        }
        Command::Verify { cases, seed, format } => verify_with(&Reference, *cases, *seed, *format, out),
    }
}

fn game(p: &ParamArgs) -> CliResult<GameParams> {
    Ok(GameParams::new(p.alpha, p.c1, p.c2)?)
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn header(out: &mut dyn Write, what: &str, p: &GameParams) -> CliResult<()> {
    writeln!(out, "{what}  alpha = {}, c1 = {}, c2 = {}", p.alpha(), p.c1(), p.c2())?;
    Ok(())
}

fn line(out: &mut dyn Write, key: &str, value: impl std::fmt::Display, note: &str) -> CliResult<()> {
    if note.is_empty() {
        writeln!(out, "  {key:<16} {value}")?;
    } else {
        writeln!(out, "  {key:<16} {value:<12} {note}")?;
    }
    Ok(())
}

fn analyze(args: &ParamArgs, delta: Option<f64>, format: Format, out: &mut dyn Write) -> CliResult<()> {
    let p = game(args)?;
    let row = ReportRow::compute(&p, delta)?;
    match format {
        Format::Json => write_json(out, &row),
        Format::Csv => write_csv(out, &[row]),
        Format::Table => {
            let eq = social_optimum(&p);
            header(out, "analyze", &p)?;
            line(out, "x_star", f6(row.x_star), "Nash effort per player")?;
            line(out, "u_star", f6(row.u_star), "Nash payoff per player")?;
            line(out, "x_hat", f6(row.x_hat), "optimal effort per player")?;
            line(out, "u_hat", f6(row.u_hat), "optimal payoff per player")?;
            line(out, "joint_at_hat", f6(eq.joint_at_hat), "joint surplus at the optimum")?;
            line(out, "u(0,0)", f6(eq.boundary_values.u_at_00), "joint surplus at zero effort")?;
            line(out, "u(alpha,alpha)", f6(eq.boundary_values.u_at_alpha_alpha), "joint surplus at full effort")?;
            line(out, "hessian_det", f6(eq.hessian_det), "4 c2^2 - alpha^2 c1^2")?;
            line(out, "delta_star", f6(row.delta_star), "critical discount factor")?;
            if let (Some(d), Some(x), Some(c), Some(v), Some(s)) =
                (row.delta, row.x_bar_max, row.coop_pv, row.dev_pv, row.is_spe)
            {
                line(out, "delta", d, "")?;
                line(out, "x_bar_max", f6(x), "largest sustainable effort")?;
                line(out, "coop_pv", f6(c), "cooperating at x_hat")?;
                line(out, "dev_pv", f6(v), "best one-shot deviation")?;
                line(out, "is_spe", s, "")?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct ThresholdOut {
    alpha: f64,
    c1: f64,
    c2: f64,
    delta_star: f64,
}

fn threshold(args: &ParamArgs, format: Format, out: &mut dyn Write) -> CliResult<()> {
    let p = game(args)?;
    let t = ThresholdOut { alpha: p.alpha(), c1: p.c1(), c2: p.c2(), delta_star: critical_delta(&p) };
    match format {
        Format::Json => write_json(out, &t),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.serialize(&t)?;
            w.flush()?;
            Ok(())
        }
        Format::Table => {
            header(out, "threshold", &p)?;
            line(out, "K", p.k(), "4 c2 - alpha c1")?;
            line(out, "l", p.l(), "2 c2 - alpha c1")?;
            line(out, "delta_star", f6(t.delta_star), "K^2 / (8 c2 l + K^2)")?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SustainOut {
    alpha: f64,
    c1: f64,
    c2: f64,
    delta: f64,
    delta_star: f64,
    x_star: f64,
    x_hat: f64,
    x_bar_max: f64,
    branch: SustainBranch,
    quadratic: Option<SustainabilityQuadratic>,
}

#[derive(Serialize)]
struct SustainCsv {
    alpha: f64,
    c1: f64,
    c2: f64,
    delta: f64,
    delta_star: f64,
    x_bar_max: f64,
    branch: &'static str,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    sqrt_disc: Option<f64>,
    root_low: Option<f64>,
    root_high: Option<f64>,
}

fn sustain(args: &ParamArgs, delta: f64, format: Format, out: &mut dyn Write) -> CliResult<()> {
    let p = game(args)?;
    let (x_bar, branch) = max_sustainable_effort_with_branch(&p, delta)?;
    let quadratic = match branch {
        SustainBranch::QuadraticRoot => Some(sustainability_quadratic(&p, delta)?),
        _ => None,
    };
    let s = SustainOut {
        alpha: p.alpha(),
        c1: p.c1(),
        c2: p.c2(),
        delta,
        delta_star: critical_delta(&p),
        x_star: nash_effort(&p),
        x_hat: optimal_effort(&p),
        x_bar_max: x_bar,
        branch,
        quadratic,
    };
    match format {
        Format::Json => write_json(out, &s),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.serialize(SustainCsv {
                alpha: s.alpha,
                c1: s.c1,
                c2: s.c2,
                delta,
                delta_star: s.delta_star,
                x_bar_max: x_bar,
                branch: branch.describe(),
                a: quadratic.map(|q| q.a),
                b: quadratic.map(|q| q.b),
                c: quadratic.map(|q| q.c),
                sqrt_disc: quadratic.map(|q| q.sqrt_disc),
                root_low: quadratic.map(|q| q.root_low),
                root_high: quadratic.map(|q| q.root_high),
            })?;
            w.flush()?;
            Ok(())
        }
        Format::Table => {
            header(out, "sustain", &p)?;
            line(out, "delta", delta, "")?;
            line(out, "delta_star", f6(s.delta_star), "critical discount factor")?;
            line(out, "x_star", f6(s.x_star), "Nash effort")?;
            line(out, "x_hat", f6(s.x_hat), "optimal effort")?;
            line(out, "x_bar", f6(x_bar), "largest sustainable effort")?;
            line(out, "branch", branch.describe(), "")?;
            if let Some(q) = quadratic {
                writeln!(out, "  sustainability quadratic A x^2 + B x + C >= 0")?;
                line(out, "A", f6(q.a), "")?;
                line(out, "B", f6(q.b), "")?;
                line(out, "C", f6(q.c), "")?;
                line(out, "sqrt_disc", f6(q.sqrt_disc), "")?;
                line(out, "root_low", f6(q.root_low), "equals the Nash effort")?;
                line(out, "root_high", f6(q.root_high), "")?;
            }
            Ok(())
        }
    }
}

fn parse_target(p: &GameParams, target: &str) -> CliResult<f64> {
    let x = match target {
        "xhat" => optimal_effort(p),
        "xstar" => nash_effort(p),
        other => other
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("target must be xhat, xstar or a number, got '{other}'")))?,
    };
    if !(0.0..=p.alpha()).contains(&x) {
        return Err(CliError::Usage(format!("target {x} outside [0, {}]", p.alpha())));
    }
    Ok(x)
}

#[derive(Serialize)]
struct SpeOut {
    alpha: f64,
    c1: f64,
    c2: f64,
    #[serde(flatten)]
    report: TriggerReport,
    scan: DeviationScan,
}

fn spe(args: &ParamArgs, delta: f64, target: &str, grid: usize, format: Format, out: &mut dyn Write) -> CliResult<()> {
    let p = game(args)?;
    let x = parse_target(&p, target)?;
    let report = trigger_report(&p, delta, x)?;
    let scan = one_shot_deviation_scan(&p, delta, x, grid)?;
    let s = SpeOut { alpha: p.alpha(), c1: p.c1(), c2: p.c2(), report, scan };
    match format {
        Format::Json => write_json(out, &s),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "alpha", "c1", "c2", "delta", "target_effort", "coop_pv", "dev_pv", "is_spe", "delta_star",
                "scan_best_effort", "scan_best_gain",
            ])?;
            w.write_record(
                [s.alpha, s.c1, s.c2, delta, x, report.coop_pv, report.dev_pv]
                    .iter()
                    .map(|v| v.to_string())
                    .chain([report.is_spe.to_string()])
                    .chain([report.critical_delta, scan.best_effort, scan.best_gain].iter().map(|v| v.to_string())),
            )?;
            w.flush()?;
            Ok(())
        }
        Format::Table => {
            header(out, "spe", &p)?;
            line(out, "delta", delta, "")?;
            line(out, "target", f6(x), "")?;
            line(out, "coop_pv", f6(report.coop_pv), "cooperate forever")?;
            line(out, "dev_effort", f6(report.dev_best_response), "best one-shot deviation")?;
            line(out, "dev_stage", f6(report.dev_stage_payoff), "deviation-period payoff")?;
            line(out, "dev_pv", f6(report.dev_pv), "deviate, then Nash reversion")?;
            line(out, "delta_star", f6(report.critical_delta), "")?;
            line(out, "is_spe", report.is_spe, "")?;
            line(out, "scan_effort", f6(scan.best_effort), "numerical deviation search")?;
            line(out, "scan_gain", format!("{:.6e}", scan.best_gain), "")?;
            Ok(())
        }
    }
}

struct SimulateOptions<'a> {
    delta: f64,
    periods: usize,
    deviate_at: Option<usize>,
    deviation: Option<f64>,
    target: &'a str,
}

#[derive(Serialize)]
struct PeriodRow {
    t: usize,
    x1: f64,
    x2: f64,
    u1: f64,
    u2: f64,
}

#[derive(Serialize)]
struct SimulateOut {
    alpha: f64,
    c1: f64,
    c2: f64,
    delta: f64,
    target: f64,
    punishment: f64,
    periods: Vec<PeriodRow>,
    pv1: f64,
    pv2: f64,
}

fn simulate(
    args: &ParamArgs,
    opts: &SimulateOptions<'_>,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<()> {
    let p = game(args)?;
    if opts.periods == 0 {
        return Err(CliError::Usage("periods must be at least 1".into()));
    }
    let x = parse_target(&p, opts.target)?;
    let trigger = TriggerSpec::nash_reversion(&p, x);
    let deviator;
    let s2: &dyn Strategy = match opts.deviate_at {
        None => {
            if opts.deviation.is_some() {
                return Err(CliError::Usage("--deviation requires --deviate-at".into()));
            }
            &trigger
        }
        Some(t) => {
            if t == 0 || t > opts.periods {
                return Err(CliError::Usage(format!("--deviate-at must lie in 1..={}, got {t}", opts.periods)));
            }
            let effort = match opts.deviation {
                Some(e) => e,
                None => best_deviation_against(&p, x)?,
            };
            deviator = DeviateAt { period: t, effort, base: trigger };
            &deviator
        }
    };
    let outcome = play_discounted(&p, &trigger, s2, opts.periods, opts.delta, TailMode::ConstantTail)?;
    let rows: Vec<PeriodRow> = outcome
        .history
        .profiles()
        .iter()
        .zip(outcome.history.payoffs())
        .enumerate()
        .map(|(i, (pr, pay))| PeriodRow { t: i + 1, x1: pr.x1, x2: pr.x2, u1: pay.u1, u2: pay.u2 })
        .collect();
    match format {
        Format::Json => write_json(
            out,
            &SimulateOut {
                alpha: p.alpha(),
                c1: p.c1(),
                c2: p.c2(),
                delta: opts.delta,
                target: x,
                punishment: trigger.punishment_effort,
                periods: rows,
                pv1: outcome.pv1,
                pv2: outcome.pv2,
            },
        ),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
            writeln!(err, "pv1={} pv2={}", outcome.pv1, outcome.pv2)?;
            Ok(())
        }
        Format::Table => {
            header(out, "simulate", &p)?;
            writeln!(out, "  delta = {}, target = {}, punishment = {}", opts.delta, f6(x), f6(trigger.punishment_effort))?;
            writeln!(out, "  {:>4} {:>10} {:>10} {:>10} {:>10}", "t", "x1", "x2", "u1", "u2")?;
            for r in &rows {
                writeln!(out, "  {:>4} {:>10} {:>10} {:>10} {:>10}", r.t, f6(r.x1), f6(r.x2), f6(r.u1), f6(r.u2))?;
            }
            line(out, "pv1", f6(outcome.pv1), "")?;
            line(out, "pv2", f6(outcome.pv2), "")?;
            writeln!(out, "  ({} periods + constant tail)", opts.periods)?;
            Ok(())
        }
    }
}

/// Evaluates every admissible grid point; returns rows in grid order and the
/// number of skipped points.
pub fn sweep_rows(grid: &SweepGrid, exec: Execution) -> (Vec<ReportRow>, usize) {
    let evaluated = exec.map(&grid.points(), |&[a, c1, c2, d]| {
        GameParams::new(a, c1, c2).ok().and_then(|p| ReportRow::compute(&p, Some(d)).ok())
    });
    let total = evaluated.len();
    let rows: Vec<ReportRow> = evaluated.into_iter().flatten().collect();
    let skipped = total - rows.len();
    (rows, skipped)
}

fn sweep(
    grid: &SweepGrid,
    path: Option<&std::path::Path>,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<()> {
    let (rows, skipped) = sweep_rows(grid, Execution::Parallel);
    if rows.is_empty() {
        return Err(CliError::Usage(format!("empty grid: no admissible points ({skipped} skipped)")));
    }
    let mut sink: Box<dyn Write + '_> = match path {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| {
            CliError::Usage(format!("cannot write {}: {e}", path.display()))
        })?)),
        None => Box::new(&mut *out),
    };
    match format {
        Format::Json => write_json(&mut *sink, &rows)?,
        Format::Csv => write_csv(&mut sink, &rows)?,
        Format::Table => return Err(CliError::Usage("sweep writes csv or json".into())),
    }
    sink.flush()?;
    writeln!(err, "sweep: {} rows written, {} points skipped", rows.len(), skipped)?;
    Ok(())
}

/// Runs the verification suite against `forms`; `Err(VerificationFailed)`
/// if any check fails.
pub fn verify_with<F: ClosedForms + ?Sized>(
    forms: &F,
    cases: usize,
    seed: u64,
    format: Format,
    out: &mut dyn Write,
) -> CliResult<()> {
    if cases == 0 {
        return Err(CliError::Usage("cases must be at least 1".into()));
    }
    let report = run_verification(forms, VerifyConfig::new(cases, seed), Execution::Parallel);
    match format {
        Format::Json => write_json(out, &report)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["check", "failed", "cases"])?;
            for c in &report.checks {
                w.write_record([c.name.to_string(), c.failed.to_string(), report.cases.to_string()])?;
            }
            w.flush()?;
        }
        Format::Table => write!(out, "{}", report.transcript())?,
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}
