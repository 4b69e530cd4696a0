//! Parametric bootstrap of witness values and finite-shot classification.

use rayon::prelude::*;

use super::reconstruct::Reconstructor;
use super::setting::{draw_multinomial, pauli_grid, resample_rng, CountRecord};
use crate::error::{Error, Result};
use crate::witness::{
    search_bases, PathwayBases, SearchOptions, Thresholds, WitnessErrors, WitnessReport,
    WitnessValues,
};

pub const DEFAULT_RESAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapOptions {
    pub resamples: usize,
    pub seed: u64,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self {
            resamples: DEFAULT_RESAMPLES,
            seed: 0,
        }
    }
}

fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Standard errors of the witness values at fixed `bases`.
///
/// Each resample redraws every record's counts from its observed
/// frequencies, reconstructs, and re-evaluates. Resample `r` uses its own
/// random stream, so results do not depend on scheduling.
pub fn bootstrap(
    records: &[CountRecord],
    bases: &PathwayBases,
    opts: &BootstrapOptions,
) -> Result<WitnessErrors> {
    if opts.resamples < 2 {
        return Err(Error::Argument(
            "bootstrap needs at least two resamples".into(),
        ));
    }
    for r in records {
        let integral = |x: f64| (x - x.round()).abs() <= 1e-9;
        if !integral(r.shots) || r.shots < 1.0 || !r.counts.iter().all(|&c| integral(c)) {
            return Err(Error::Argument(format!(
                "bootstrap needs integer counts, {} has {:?} of {}",
                r.setting, r.counts, r.shots
            )));
        }
    }
    let inverter = Reconstructor::new(&pauli_grid())?;
    let values: Vec<WitnessValues> = (0..opts.resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = resample_rng(opts.seed, i as u64);
            let resampled: Vec<CountRecord> = records
                .iter()
                .map(|r| CountRecord {
                    setting: r.setting,
                    counts: draw_multinomial(&mut rng, &r.frequencies(), r.shots as u64),
                    shots: r.shots,
                })
                .collect();
            inverter
                .reconstruct(&resampled)
                .map(|map| WitnessValues::evaluate(&map, bases))
        })
        .collect::<Result<_>>()?;

    let col = |f: fn(&WitnessValues) -> f64| std_dev(&values.iter().map(f).collect::<Vec<_>>());
    Ok(WitnessErrors {
        resamples: opts.resamples,
        c_cd: col(|v| v.c_cd),
        cc: col(|v| v.cc),
        ce: col(|v| v.ce),
        berkson: col(|v| v.berkson),
        cc_marginal: col(|v| v.cc_marginal),
        ce_marginal: col(|v| v.ce_marginal),
    })
}

/// Thresholds `max(ε, 2·SE)` per witness.
pub fn bootstrap_thresholds(epsilon: f64, errors: &WitnessErrors) -> Thresholds {
    Thresholds {
        c_cd: epsilon.max(2.0 * errors.c_cd),
        cc: epsilon.max(2.0 * errors.cc),
        ce: epsilon.max(2.0 * errors.ce),
        berkson: epsilon.max(2.0 * errors.berkson),
        cc_marginal: epsilon.max(2.0 * errors.cc_marginal),
        ce_marginal: epsilon.max(2.0 * errors.ce_marginal),
    }
}

/// Reconstructs from records and classifies. With bootstrap options the
/// thresholds become `max(ε, 2·SE)`; without (pseudo-counts) plain `ε` is used.
pub fn classify_records(
    records: &[CountRecord],
    epsilon: f64,
    search: &SearchOptions,
    bootstrap_opts: Option<&BootstrapOptions>,
) -> Result<WitnessReport> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::Argument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let map = super::reconstruct::reconstruct(records)?;
    let bases = search_bases(&map, search);
    let values = WitnessValues::evaluate(&map, &bases);
    let Some(opts) = bootstrap_opts else {
        return Ok(WitnessReport::from_values(
            values,
            bases,
            &Thresholds::uniform(epsilon),
            epsilon,
        ));
    };
    let errors = bootstrap(records, &bases, opts)?;
    let mut report = WitnessReport::from_values(
        values,
        bases,
        &bootstrap_thresholds(epsilon, &errors),
        epsilon,
    );
    report.errors = Some(errors);
    Ok(report)
}
