//! One-parameter θ fits and imperfection-aware prediction from a base map.

use std::f64::consts::PI;

use super::setting::{outcome_probabilities, CountRecord};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::model::{build_causal_map, phi_plus, CausalMap, FamilyPoint, FragmentSpec, Provenance};
use crate::optim::{golden_section, NelderMead};

const THETA_GRID: usize = 37;
const THETA_TOL: f64 = 1e-7;

/// Data a θ fit is run against.
#[derive(Debug, Clone, Copy)]
pub enum FitTarget<'a> {
    /// Observed frequencies, compared cell by cell.
    Records(&'a [CountRecord]),
    /// A map, compared entrywise on `τ_CBD`.
    Map(&'a CausalMap),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub theta_hat: f64,
    /// Sum of squared differences at `theta_hat`.
    pub residual: f64,
    /// Gauss-Newton variance estimate of `theta_hat`.
    pub covariance_est: f64,
}

fn predictions(
    target: &FitTarget<'_>,
    family: &FamilyPoint,
    theta: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let map = FamilyPoint { theta, ..*family }.build()?;
    Ok(match target {
        FitTarget::Records(records) => {
            let mut obs = Vec::with_capacity(records.len() * 4);
            let mut pred = Vec::with_capacity(records.len() * 4);
            for r in *records {
                obs.extend(r.frequencies());
                pred.extend(outcome_probabilities(&map, &r.setting));
            }
            (obs, pred)
        }
        FitTarget::Map(base) => (flatten(base.tau()), flatten(map.tau())),
    })
}

fn flatten(m: &ComplexMatrix) -> Vec<f64> {
    m.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
}

fn sum_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Least-squares fit of θ ∈ [0, π] with every other family parameter fixed.
///
/// A coarse grid brackets the minimum, golden-section search refines it.
pub fn fit_theta(target: FitTarget<'_>, family: &FamilyPoint) -> Result<FitResult> {
    if let FitTarget::Records(r) = target {
        if r.is_empty() {
            return Err(Error::Argument("no records to fit".into()));
        }
    }
    family.validate()?;
    let cost = |theta: f64| -> f64 {
        match predictions(&target, family, theta) {
            Ok((obs, pred)) => sum_sq(&obs, &pred),
            Err(_) => f64::INFINITY,
        }
    };

    let step = PI / (THETA_GRID - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..THETA_GRID)
        .map(|i| {
            let t = i as f64 * step;
            (t, cost(t))
        })
        .collect();
    let best = grid
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .expect("grid is nonempty");
    let lo = best.saturating_sub(1) as f64 * step;
    let hi = ((best + 1).min(THETA_GRID - 1)) as f64 * step;
    let (theta_hat, residual) = golden_section(cost, lo, hi, THETA_TOL);

    let (obs, pred) = predictions(&target, family, theta_hat)?;
    let h = 1e-5;
    let (_, up) = predictions(&target, family, theta_hat + h)?;
    let (_, down) = predictions(&target, family, theta_hat - h)?;
    let jtj: f64 = up
        .iter()
        .zip(&down)
        .map(|(u, d)| ((u - d) / (2.0 * h)).powi(2))
        .sum();
    let dof = obs.len().saturating_sub(1).max(1) as f64;
    let s2 = sum_sq(&obs, &pred) / dof;
    let covariance_est = if jtj > 0.0 { s2 / jtj } else { f64::INFINITY };

    Ok(FitResult {
        theta_hat,
        residual: residual.max(0.0),
        covariance_est,
    })
}

/// Transformation applied analytically to a fitted base map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// Nominal two-photon overlap `q` (multiplied by the fitted base overlap).
    Delay { q: f64 },
    /// Dephasing probability along the nominal axes.
    Dephasing { p: f64 },
    /// Full dephasing along the `η` axes.
    Eta { eta: f64 },
}

impl Transform {
    fn apply(&self, nominal: &FamilyPoint) -> FamilyPoint {
        match *self {
            Transform::Delay { q } => FamilyPoint { q, ..*nominal },
            Transform::Dephasing { p } => FamilyPoint { p, ..*nominal },
            Transform::Eta { eta } => FamilyPoint {
                p: 1.0,
                eta,
                ..*nominal
            },
        }
    }
}

/// Imperfections absorbed from a base map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Imperfections {
    pub theta: f64,
    /// Weight of `Φ⁺` in the initial state; the rest is white noise.
    pub visibility: f64,
    /// Multiplies the nominal overlap of the delay gate.
    pub overlap: f64,
    /// Weight of `I/8` mixed into the output.
    pub white_noise: f64,
    /// Frobenius distance between the base and the fitted model.
    pub residual: f64,
}

impl Imperfections {
    pub fn ideal(theta: f64) -> Self {
        Self {
            theta,
            visibility: 1.0,
            overlap: 1.0,
            white_noise: 0.0,
            residual: 0.0,
        }
    }

    /// Builds the family map at `point` carrying these imperfections.
    pub fn build(&self, point: &FamilyPoint) -> Result<CausalMap> {
        let point = FamilyPoint {
            theta: self.theta,
            q: (point.q * self.overlap).clamp(0.0, 1.0),
            ..*point
        };
        let ideal = point.fragment()?;
        let initial = &phi_plus().scale(self.visibility)
            + &ComplexMatrix::identity(4).scale((1.0 - self.visibility) / 4.0);
        let spec = FragmentSpec::new(initial, ideal.pre_d, ideal.pre_e, ideal.gate, ideal.post_b)?;
        let map = build_causal_map(&spec)?;
        if self.white_noise == 0.0 {
            return Ok(map);
        }
        let tau = &map.tau().scale(1.0 - self.white_noise)
            + &ComplexMatrix::identity(8).scale(self.white_noise / 8.0);
        CausalMap::new(tau, Provenance::Fragment(Box::new(spec)))
    }
}

/// Frobenius residual above which a fitted base is flagged.
pub const PREDICTION_RESIDUAL_WARN: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct Prediction {
    pub map: CausalMap,
    pub fit: Imperfections,
    pub warning: Option<String>,
}

fn unpack(x: &[f64]) -> Imperfections {
    Imperfections {
        theta: x[0].clamp(0.0, PI),
        visibility: 1.0 - (x[1] * x[1]).min(1.0),
        overlap: 1.0 - (x[2] * x[2]).min(1.0),
        white_noise: (x[3] * x[3]).min(1.0),
        residual: 0.0,
    }
}

/// Fits θ, initial-state visibility, gate overlap and output white noise so
/// that the family map at `nominal` reproduces `base`.
pub fn fit_imperfections(base: &CausalMap, nominal: &FamilyPoint) -> Result<Imperfections> {
    let start_theta = fit_theta(FitTarget::Map(base), nominal)?.theta_hat;
    let distance = |imp: &Imperfections| -> f64 {
        imp.build(nominal)
            .map(|m| (m.tau() - base.tau()).frobenius_norm())
            .unwrap_or(f64::INFINITY)
    };
    let cost = |x: &[f64]| distance(&unpack(x)).powi(2);

    let start = [start_theta, 0.0, 0.0, 0.0];
    let nm = NelderMead {
        max_iterations: 2000,
        tolerance: 1e-12,
        initial_step: 0.05,
    };
    let mut best = nm.minimize(cost, &start);
    // one restart from the optimum escapes early simplex collapse
    let again = nm.minimize(cost, &best.x);
    if again.value <= best.value {
        best = again;
    }
    let mut imp = unpack(&best.x);
    imp.residual = distance(&imp);
    Ok(imp)
}

/// Re-derives the base's imperfections and rebuilds it under `transform`.
pub fn predict_from_base(
    base: &CausalMap,
    nominal: &FamilyPoint,
    transform: Transform,
) -> Result<Prediction> {
    let fit = fit_imperfections(base, nominal)?;
    let warning = (fit.residual > PREDICTION_RESIDUAL_WARN).then(|| {
        format!(
            "base map is {:.3e} (Frobenius) from the best imperfect family member",
            fit.residual
        )
    });
    let map = fit.build(&transform.apply(nominal))?;
    Ok(Prediction { map, fit, warning })
}
