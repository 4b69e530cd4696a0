use rayon::prelude::*;
use serde::Serialize;

use super::config::{Family, SweepConfig};
use crate::error::Result;
use crate::model::{q_from_delay, CausalMap, FamilyPoint};
use crate::tomography::{classify_records, pauli_grid, simulate_counts, BootstrapOptions};
use crate::witness::{classify, ReportJson, SearchOptions, WitnessReport};

#[derive(Debug, Clone)]
pub struct SweepRow {
    /// Name of the swept parameter; `tau=<value>` for delay sweeps in `τ`.
    pub param_name: String,
    pub point: FamilyPoint,
    pub tau: Option<f64>,
    pub report: WitnessReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRowJson {
    pub param_name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub theta: f64,
    pub p: f64,
    pub q: f64,
    pub eta: f64,
    #[serde(flatten)]
    pub report: ReportJson,
}

impl SweepRow {
    pub fn to_json(&self) -> SweepRowJson {
        SweepRowJson {
            param_name: self.param_name.clone(),
            tau: self.tau,
            theta: self.point.theta,
            p: self.point.p,
            q: self.point.q,
            eta: self.point.eta,
            report: self.report.to_json(),
        }
    }
}

/// One grid point before evaluation.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub param_name: String,
    pub point: FamilyPoint,
    pub tau: Option<f64>,
}

/// Grid points in output order (outermost parameter varies slowest).
pub fn grid_points(config: &SweepConfig) -> Result<Vec<GridPoint>> {
    config.validate()?;
    let base = config.base_point();
    let mut points = vec![(base, None)];
    for (name, grid) in &config.grid {
        let values = grid.points();
        let mut next = Vec::with_capacity(points.len() * values.len());
        for (pt, tau) in &points {
            for &v in &values {
                let mut pt: FamilyPoint = *pt;
                let mut tau = *tau;
                match name.as_str() {
                    "theta" => pt.theta = v,
                    "p" => pt.p = v,
                    "q" => pt.q = v,
                    "eta" => pt.eta = v,
                    "tau" => {
                        let tc = config.fixed.tau_coh.expect("validated");
                        pt.q = q_from_delay(v, tc)?;
                        tau = Some(v);
                    }
                    _ => unreachable!("validated"),
                }
                next.push((pt, tau));
            }
        }
        points = next;
    }
    let name = match config.family {
        Family::Delay => "q",
        Family::ThetaP => "theta_p",
        Family::Eta => "eta",
    };
    Ok(points
        .into_iter()
        .map(|(point, tau)| GridPoint {
            param_name: match tau {
                Some(t) => format!("tau={}", super::output::format_sig(t)),
                None => name.to_string(),
            },
            point,
            tau,
        })
        .collect())
}

fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn evaluate(config: &SweepConfig, index: usize, point: &FamilyPoint) -> Result<WitnessReport> {
    let map: CausalMap = point.build()?;
    match config.shots {
        None => classify(&map, config.epsilon),
        Some(shots) => {
            let seed = point_seed(config.seed.unwrap_or(0), index);
            let records = simulate_counts(&map, &pauli_grid(), shots, seed)?;
            let opts = BootstrapOptions {
                seed,
                ..Default::default()
            };
            classify_records(
                &records,
                config.epsilon,
                &SearchOptions::default(),
                Some(&opts),
            )
        }
    }
}

/// Evaluates every grid point (in parallel) and returns rows in grid order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let points = grid_points(config)?;
    points
        .into_par_iter()
        .enumerate()
        .map(|(i, gp)| {
            let report = evaluate(config, i, &gp.point)?;
            Ok(SweepRow {
                param_name: gp.param_name,
                point: gp.point,
                tau: gp.tau,
                report,
            })
        })
        .collect()
}
