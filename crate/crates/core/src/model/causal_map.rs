//! Causal maps `E_CB|D` represented by their Choi state `τ_CBD`.
//!
//! Conventions: `τ_CBD` has trace one and layout `[C, B, D]`; the map acts as
//! `E(ρ) = 2 Tr_D[τ (I_CB ⊗ ρᵀ)]`, so `Tr_CB τ = I_D / 2` expresses trace
//! preservation.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::channel::Dephasing;
use super::gate::TwoQubitGate;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, partial_trace, ComplexMatrix, LabeledState, SubsystemLayout,
};

/// Tolerance for the trace, positivity and trace-preservation invariants of a map.
pub const MAP_TOL: f64 = 1e-9;
const STATE_TOL: f64 = 1e-10;

pub const MAP_LABELS: [&str; 3] = ["C", "B", "D"];

/// `(|00> + |11>)/√2` as a density operator.
pub fn phi_plus() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::outer(&[s, 0.0, 0.0, s].map(|x| Complex64::new(x, 0.0)))
}

/// Checks that `rho` is a density operator: Hermitian, trace one, PSD.
pub fn validate_density(rho: &ComplexMatrix, tol: f64) -> Result<()> {
    let herm = rho.hermiticity_defect();
    if herm > tol {
        return Err(Error::Argument(format!(
            "state is not Hermitian (defect {herm:e})"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::Argument(format!("state trace is {tr}, expected 1")));
    }
    let lam = hermitian_eigenvalues(&rho.hermitian_part())?[0];
    if lam < -tol {
        return Err(Error::Argument(format!(
            "state is not positive (λ_min = {lam:e})"
        )));
    }
    Ok(())
}

/// Circuit fragment: initial state on `C ⊗ E`, dephasing on `D` and `E`,
/// a gate `DE → BF`, dephasing on `B`; `F` is discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentSpec {
    pub(crate) initial_state: ComplexMatrix,
    pub pre_d: Dephasing,
    pub pre_e: Dephasing,
    pub gate: TwoQubitGate,
    pub post_b: Dephasing,
}

impl FragmentSpec {
    pub fn new(
        initial_state: ComplexMatrix,
        pre_d: Dephasing,
        pre_e: Dephasing,
        gate: TwoQubitGate,
        post_b: Dephasing,
    ) -> Result<Self> {
        if initial_state.dim() != 4 {
            return Err(Error::Argument("initial state on C⊗E must be 4x4".into()));
        }
        validate_density(&initial_state, STATE_TOL)?;
        Ok(Self {
            initial_state,
            pre_d,
            pre_e,
            gate,
            post_b,
        })
    }

    /// `Φ⁺` on `C ⊗ E`, the given gate, no dephasing.
    pub fn with_gate(gate: TwoQubitGate) -> Self {
        Self {
            initial_state: phi_plus(),
            pre_d: Dephasing::none(),
            pre_e: Dephasing::none(),
            gate,
            post_b: Dephasing::none(),
        }
    }

    pub fn initial_state(&self) -> &ComplexMatrix {
        &self.initial_state
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Fragment(Box<FragmentSpec>),
    Reconstructed,
    Imported,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalMap {
    tau: ComplexMatrix,
    provenance: Provenance,
}

/// Deviation of a candidate `τ_CBD` from the causal-map invariants.
#[derive(Debug, Clone, Copy)]
pub struct MapDiagnostics {
    pub hermiticity: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
    pub trace_preservation: f64,
}

impl MapDiagnostics {
    pub fn of(tau: &ComplexMatrix) -> Result<Self> {
        if tau.dim() != 8 {
            return Err(Error::Argument(format!(
                "τ_CBD must be 8x8, got {}",
                tau.dim()
            )));
        }
        let hermiticity = tau.hermiticity_defect();
        let trace_error = (tau.trace() - Complex64::new(1.0, 0.0)).norm();
        let min_eigenvalue = hermitian_eigenvalues(&tau.hermitian_part())?[0];
        let layout = SubsystemLayout::new(&MAP_LABELS)?;
        let marginal = partial_trace(tau, &layout, &["D"])?;
        let trace_preservation = marginal.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5));
        Ok(Self {
            hermiticity,
            trace_error,
            min_eigenvalue,
            trace_preservation,
        })
    }

    pub fn within(&self, tol: f64) -> bool {
        self.hermiticity <= tol
            && self.trace_error <= tol
            && self.min_eigenvalue >= -tol
            && self.trace_preservation <= tol
    }
}

impl CausalMap {
    pub fn new(tau: ComplexMatrix, provenance: Provenance) -> Result<Self> {
        let diag = MapDiagnostics::of(&tau)?;
        if !diag.within(MAP_TOL) {
            return Err(Error::Construction(format!(
                "τ_CBD violates invariants: |τ-τ†| = {:e}, |Tr τ - 1| = {:e}, λ_min = {:e}, |Tr_CB τ - I/2| = {:e}",
                diag.hermiticity, diag.trace_error, diag.min_eigenvalue, diag.trace_preservation
            )));
        }
        Ok(Self {
            tau: tau.hermitian_part(),
            provenance,
        })
    }

    pub fn tau(&self) -> &ComplexMatrix {
        &self.tau
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn fragment(&self) -> Option<&FragmentSpec> {
        match &self.provenance {
            Provenance::Fragment(f) => Some(f),
            _ => None,
        }
    }

    pub fn layout() -> SubsystemLayout {
        SubsystemLayout::new(&MAP_LABELS).expect("static labels")
    }

    pub fn labeled(&self) -> LabeledState {
        LabeledState::new(&MAP_LABELS, self.tau.clone()).expect("8x8 on three qubits")
    }

    /// `E_CB|D(ρ)` on `C ⊗ B`.
    pub fn apply(&self, rho_d: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho_d.dim() != 2 {
            return Err(Error::Argument("input state on D must be 2x2".into()));
        }
        validate_density(rho_d, STATE_TOL)?;
        Ok(self.apply_unchecked(rho_d))
    }

    /// [`CausalMap::apply`] without input validation; linear in `rho_d`.
    pub fn apply_unchecked(&self, rho_d: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(4);
        for x in 0..4 {
            for y in 0..4 {
                let mut acc = Complex64::new(0.0, 0.0);
                for d in 0..2 {
                    for f in 0..2 {
                        acc += self.tau[(x * 2 + d, y * 2 + f)] * rho_d[(d, f)];
                    }
                }
                out[(x, y)] = acc * 2.0;
            }
        }
        out
    }

    pub fn to_json(&self) -> MapJson {
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..8)
                .map(|i| (0..8).map(|j| f(&self.tau[(i, j)])).collect())
                .collect()
        };
        MapJson {
            layout: MAP_LABELS.iter().map(|s| s.to_string()).collect(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn from_json(json: &MapJson) -> Result<Self> {
        if json.re.len() != 8 || json.im.len() != 8 {
            return Err(Error::Parse(
                "map JSON needs 8 rows in `re` and `im`".into(),
            ));
        }
        let mut m = ComplexMatrix::zeros(8);
        for i in 0..8 {
            if json.re[i].len() != 8 || json.im[i].len() != 8 {
                return Err(Error::Parse(format!(
                    "map JSON row {i} does not have 8 entries"
                )));
            }
            for j in 0..8 {
                m[(i, j)] = Complex64::new(json.re[i][j], json.im[i][j]);
            }
        }
        let state = LabeledState::new(&json.layout, m).map_err(|e| Error::Parse(e.to_string()))?;
        let mut sorted = json.layout.clone();
        sorted.sort();
        if sorted != ["B", "C", "D"] {
            return Err(Error::Parse(format!(
                "map layout must be a permutation of C,B,D, got {:?}",
                json.layout
            )));
        }
        let state = state.reorder(&MAP_LABELS)?;
        let diag = MapDiagnostics::of(state.matrix())?;
        if !diag.within(MAP_TOL) {
            return Err(Error::Contract(format!(
                "imported map violates invariants: |τ-τ†| = {:e}, |Tr τ - 1| = {:e}, λ_min = {:e}, |Tr_CB τ - I/2| = {:e}",
                diag.hermiticity, diag.trace_error, diag.min_eigenvalue, diag.trace_preservation
            )));
        }
        CausalMap::new(state.into_matrix(), Provenance::Imported)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json()).expect("plain data serializes");
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let json: MapJson = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&json)
    }
}

/// Wire format of a causal map: row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapJson {
    pub layout: Vec<String>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Assembles `τ_CBD` by feeding half of `Φ⁺_{DD'}` through the fragment and keeping `D'`.
pub fn build_causal_map(spec: &FragmentSpec) -> Result<CausalMap> {
    let tau = choi_of_fragment(spec)?;
    CausalMap::new(tau, Provenance::Fragment(Box::new(spec.clone())))
}

fn choi_of_fragment(spec: &FragmentSpec) -> Result<ComplexMatrix> {
    let ce = LabeledState::new(&["C", "E"], spec.initial_state.clone())?;
    let dd = LabeledState::new(&["D", "D'"], phi_plus())?;
    let mut state = ce.tensor(&dd)?.reorder(&["C", "D", "E", "D'"])?;
    if !spec.pre_d.is_trivial() {
        state = state.apply_qubit_choi(spec.pre_d.channel().choi(), "D")?;
    }
    if !spec.pre_e.is_trivial() {
        state = state.apply_qubit_choi(spec.pre_e.channel().choi(), "E")?;
    }
    let mut evolved = ComplexMatrix::zeros(16);
    for (w, u) in spec.gate.terms() {
        if w == 0.0 {
            continue;
        }
        let term = state.apply_unitary(u, &["D", "E"])?;
        evolved = &evolved + &term.matrix().scale(w);
    }
    let mut state = LabeledState::new(&["C", "B", "F", "D'"], evolved)?;
    if !spec.post_b.is_trivial() {
        state = state.apply_qubit_choi(spec.post_b.channel().choi(), "B")?;
    }
    let reduced = state.partial_trace(&["C", "B", "D'"])?.relabel("D'", "D")?;
    Ok(reduced.into_matrix())
}

/// `E_CB|D(ρ_D)` for a validated input state.
pub fn apply_map(map: &CausalMap, rho_d: &ComplexMatrix) -> Result<ComplexMatrix> {
    map.apply(rho_d)
}
