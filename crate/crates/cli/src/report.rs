//! Flat per-point records shared by `analyze` and `sweep`.

use partnership::equilibrium::social_optimum;
use partnership::trigger::{critical_delta, max_sustainable_effort, trigger_report};
use partnership::GameParams;
use serde::{Deserialize, Serialize};

use crate::error::CliResult;

/// Exact CSV header of sweep output.
pub const CSV_HEADER: &str = "alpha,c1,c2,delta,x_star,x_hat,u_star,u_hat,delta_star,x_bar_max,coop_pv,dev_pv,is_spe";

/// One analysed parameter point. Discount-dependent fields are empty when no
/// discount factor was given; `coop_pv`, `dev_pv` and `is_spe` refer to
/// cooperation at the joint optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub alpha: f64,
    pub c1: f64,
    pub c2: f64,
    pub delta: Option<f64>,
    pub x_star: f64,
    pub x_hat: f64,
    pub u_star: f64,
    pub u_hat: f64,
    pub delta_star: f64,
    pub x_bar_max: Option<f64>,
    pub coop_pv: Option<f64>,
    pub dev_pv: Option<f64>,
    pub is_spe: Option<bool>,
}

impl ReportRow {
    pub fn compute(params: &GameParams, delta: Option<f64>) -> CliResult<Self> {
        let eq = social_optimum(params);
        let mut row = ReportRow {
            alpha: params.alpha(),
            c1: params.c1(),
            c2: params.c2(),
            delta,
            x_star: eq.x_star,
            x_hat: eq.x_hat,
            u_star: eq.u_star,
            u_hat: eq.u_hat_per_player,
            delta_star: critical_delta(params),
            x_bar_max: None,
            coop_pv: None,
            dev_pv: None,
            is_spe: None,
        };
        if let Some(d) = delta {
            let tr = trigger_report(params, d, eq.x_hat)?;
            row.x_bar_max = Some(max_sustainable_effort(params, d)?);
            row.coop_pv = Some(tr.coop_pv);
            row.dev_pv = Some(tr.dev_pv);
            row.is_spe = Some(tr.is_spe);
        }
        Ok(row)
    }
}

/// Writes rows as CSV with [`CSV_HEADER`].
pub fn write_csv<W: std::io::Write>(out: W, rows: &[ReportRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush()?;
    Ok(())
}
