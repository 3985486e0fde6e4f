//! `start:stop:step` range parsing for sweeps.

use crate::error::{CliError, CliResult};

/// Values of one swept parameter, in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis(pub Vec<f64>);

/// Rounds to 12 significant digits so `0.1 + 2 * 0.1` lands on `0.3`.
fn snap(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

fn parse_number(s: &str, name: &str) -> CliResult<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Usage(format!("{name}: cannot parse '{s}' as a number")))
}

impl Axis {
    /// Parses either a single number or `start:stop:step`.
    ///
    /// `stop` is included when `(stop - start) / step` is an integer to
    /// within a relative 1e-9.
    pub fn parse(spec: &str, name: &str) -> CliResult<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        match parts.as_slice() {
            [single] => Ok(Axis(vec![parse_number(single, name)?])),
            [start, stop, step] => {
                let (start, stop, step) =
                    (parse_number(start, name)?, parse_number(stop, name)?, parse_number(step, name)?);
                if !(step > 0.0) {
                    return Err(CliError::Usage(format!("{name}: step must be positive, got {step}")));
                }
                if start > stop {
                    return Err(CliError::Usage(format!("{name}: start {start} exceeds stop {stop}")));
                }
                let ratio = (stop - start) / step;
                let nearest = ratio.round();
                let integral = (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0);
                let n = if integral { nearest } else { ratio.floor() } as usize;
                let values = (0..=n)
                    .map(|k| if integral && k == n { stop } else { snap(start + k as f64 * step) })
                    .collect();
                Ok(Axis(values))
            }
            _ => Err(CliError::Usage(format!("{name}: expected a number or start:stop:step, got '{spec}'"))),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A rectangular grid over `(alpha, c1, c2, delta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub alpha: Axis,
    pub c1: Axis,
    pub c2: Axis,
    pub delta: Axis,
}

impl SweepGrid {
    /// All grid points in lexicographic `(alpha, c1, c2, delta)` order.
    pub fn points(&self) -> Vec<[f64; 4]> {
        let mut out = Vec::with_capacity(self.alpha.len() * self.c1.len() * self.c2.len() * self.delta.len());
        for &a in &self.alpha.0 {
            for &c1 in &self.c1.0 {
                for &c2 in &self.c2.0 {
                    for &d in &self.delta.0 {
                        out.push([a, c1, c2, d]);
                    }
                }
            }
        }
        out
    }
}
