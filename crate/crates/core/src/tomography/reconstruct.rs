//! Linear-inversion reconstruction of `τ_CBD` from count records.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::setting::{basis_label, CountRecord, TomographySetting, OUTCOMES};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, min_eigenvalue, partial_trace, pauli, ComplexMatrix};
use crate::model::{CausalMap, Provenance};

/// Relative singular-value cutoff below which the design is rank deficient.
const RANK_TOL: f64 = 1e-10;

fn paulis() -> [ComplexMatrix; 4] {
    [pauli::identity(), pauli::x(), pauli::y(), pauli::z()]
}

/// `σ_i ⊗ σ_j ⊗ σ_k` for the flat index `16 i + 4 j + k`.
fn pauli_product(index: usize) -> ComplexMatrix {
    let p = paulis();
    p[index / 16].kron(&p[(index / 4) % 4]).kron(&p[index % 4])
}

/// Least-squares inverter for a fixed list of settings.
///
/// `τ = Σ t_ijk σ_i ⊗ σ_j ⊗ σ_k / 8` with 64 real `t`; each outcome cell gives
/// the linear equation `P(c, b | d) = 2 Tr[τ (Π^c ⊗ Π^b ⊗ ρ_dᵀ)]`.
#[derive(Debug, Clone)]
pub struct Reconstructor {
    settings: Vec<TomographySetting>,
    pseudo_inverse: DMatrix<f64>,
}

impl Reconstructor {
    pub fn new(settings: &[TomographySetting]) -> Result<Self> {
        let p = paulis();
        let rows = settings.len() * 4;
        let mut design = DMatrix::<f64>::zeros(rows, 64);
        for (s_idx, s) in settings.iter().enumerate() {
            let d_t = s.d_prep.density().transpose();
            let dk: Vec<f64> = p.iter().map(|sk| d_t.trace_product(sk).re).collect();
            for (o_idx, (c, b)) in OUTCOMES.into_iter().enumerate() {
                let pc = s.c_basis.projector(c);
                let pb = s.b_basis.projector(b);
                let ci: Vec<f64> = p.iter().map(|si| pc.trace_product(si).re).collect();
                let bj: Vec<f64> = p.iter().map(|sj| pb.trace_product(sj).re).collect();
                let row = s_idx * 4 + o_idx;
                for idx in 0..64 {
                    design[(row, idx)] = 0.25 * ci[idx / 16] * bj[(idx / 4) % 4] * dk[idx % 4];
                }
            }
        }
        let svd = design.svd(true, true);
        let max_sv = svd.singular_values.max();
        let min_sv = svd.singular_values.min();
        if svd.singular_values.len() < 64 || min_sv.is_nan() || min_sv <= RANK_TOL * max_sv {
            return Err(Error::Reconstruction(format!(
                "design matrix is rank deficient (σ_min/σ_max = {:e})",
                if max_sv > 0.0 { min_sv / max_sv } else { 0.0 }
            )));
        }
        let pseudo_inverse = svd
            .pseudo_inverse(RANK_TOL * max_sv)
            .map_err(|e| Error::Reconstruction(e.to_string()))?;
        Ok(Self {
            settings: settings.to_vec(),
            pseudo_inverse,
        })
    }

    pub fn settings(&self) -> &[TomographySetting] {
        &self.settings
    }

    /// Unprojected linear-inversion estimate (Hermitian, not necessarily positive).
    pub fn linear_estimate(&self, records: &[CountRecord]) -> Result<ComplexMatrix> {
        let freqs = self.aligned_frequencies(records)?;
        let t = &self.pseudo_inverse * freqs;
        let mut tau = ComplexMatrix::zeros(8);
        for (idx, &coef) in t.iter().enumerate() {
            tau = &tau + &pauli_product(idx).scale(coef / 8.0);
        }
        Ok(tau.hermitian_part())
    }

    pub fn reconstruct(&self, records: &[CountRecord]) -> Result<CausalMap> {
        let tau = project_to_causal_map(&self.linear_estimate(records)?)?;
        CausalMap::new(tau, Provenance::Reconstructed)
    }

    /// Frequencies in design order; repeated settings are pooled.
    fn aligned_frequencies(&self, records: &[CountRecord]) -> Result<DVector<f64>> {
        let mut counts = vec![[0.0f64; 4]; self.settings.len()];
        let mut shots = vec![0.0f64; self.settings.len()];
        for r in records {
            let idx = self
                .settings
                .iter()
                .position(|s| s == &r.setting)
                .ok_or_else(|| {
                    Error::Argument(format!("record for unexpected setting {}", r.setting))
                })?;
            for (acc, c) in counts[idx].iter_mut().zip(r.counts) {
                *acc += c;
            }
            shots[idx] += r.shots;
        }
        let missing: Vec<String> = self
            .settings
            .iter()
            .zip(&shots)
            .filter(|(_, &n)| n <= 0.0)
            .map(|(s, _)| s.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::Argument(format!(
                "missing {} of {} settings: {}",
                missing.len(),
                self.settings.len(),
                missing.join(", ")
            )));
        }
        Ok(DVector::from_iterator(
            self.settings.len() * 4,
            counts
                .iter()
                .zip(&shots)
                .flat_map(|(c, &n)| c.map(|x| x / n)),
        ))
    }
}

/// Hermitize, clip negative eigenvalues, renormalize, restore trace
/// preservation, and mix in white noise if positivity was lost again.
pub fn project_to_causal_map(estimate: &ComplexMatrix) -> Result<ComplexMatrix> {
    let herm = estimate.hermitian_part();
    let eig = hermitian_eigen(&herm)?;
    let clipped = eig.reconstruct_with(|l| l.max(0.0));
    let tr = clipped.trace().re;
    if tr.is_nan() || tr <= 0.0 {
        return Err(Error::Reconstruction(
            "estimate has no positive part".into(),
        ));
    }
    let mut tau = clipped.scale(1.0 / tr);

    let layout = CausalMap::layout();
    let marginal = partial_trace(&tau, &layout, &["D"])?;
    let defect = &ComplexMatrix::identity(2).scale(0.5) - &marginal;
    tau = &tau + &ComplexMatrix::identity(4).scale(0.25).kron(&defect);
    tau = tau.hermitian_part();

    let lam = min_eigenvalue(&tau)?;
    if lam < 0.0 {
        // smallest λ with (1-λ)·lam + λ/8 ≥ 0
        let w = -lam / (0.125 - lam);
        tau = &tau.scale(1.0 - w) + &ComplexMatrix::identity(8).scale(w / 8.0);
    }
    let tr = tau.trace();
    Ok(tau
        .scale_complex(Complex64::new(1.0, 0.0) / tr)
        .hermitian_part())
}

/// Reconstructs from records covering the full 3 × 6 × 3 Pauli grid.
pub fn reconstruct(records: &[CountRecord]) -> Result<CausalMap> {
    let grid = super::setting::pauli_grid();
    for r in records {
        if !grid.contains(&r.setting) {
            let (c, d, b) = r.setting.labels();
            return Err(Error::Argument(format!(
                "setting ({c}, {d}, {b}) is not on the Pauli grid"
            )));
        }
    }
    Reconstructor::new(&grid)?.reconstruct(records)
}

/// Labels of settings that appear in `grid` but not in `records`.
pub fn missing_settings(records: &[CountRecord], grid: &[TomographySetting]) -> Vec<String> {
    grid.iter()
        .filter(|s| !records.iter().any(|r| &r.setting == *s))
        .map(|s| {
            format!(
                "({}, {}, {})",
                basis_label(&s.c_basis),
                s.d_prep,
                basis_label(&s.b_basis)
            )
        })
        .collect()
}
