use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{partial_transpose, pauli, trace_norm, ComplexMatrix, SubsystemLayout};
use crate::model::{BlochVector, CausalMap};

/// Probabilities below this are treated as impossible outcomes.
pub const ZERO_PROBABILITY: f64 = 1e-12;
/// Negativities below this are reported as exactly zero.
pub const NEGATIVITY_FLOOR: f64 = 1e-12;

/// Subsystem of the map that is measured (C, B) or prepared (D).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum System {
    C,
    B,
    D,
}

impl System {
    pub fn label(self) -> &'static str {
        match self {
            System::C => "C",
            System::B => "B",
            System::D => "D",
        }
    }

    /// Labels of the two-qubit state left after conditioning on `self`.
    pub fn remaining(self) -> [&'static str; 2] {
        match self {
            System::C => ["B", "D"],
            System::B => ["C", "D"],
            System::D => ["C", "B"],
        }
    }

    fn position(self) -> usize {
        match self {
            System::C => 0,
            System::B => 1,
            System::D => 2,
        }
    }
}

/// Rank-one projective measurement `{Π⁺, Π⁻}` along a Bloch direction.
#[derive(Debug, Clone)]
pub struct ProjectivePair {
    pub bloch: BlochVector,
    pub plus: ComplexMatrix,
    pub minus: ComplexMatrix,
}

impl ProjectivePair {
    pub fn new(bloch: BlochVector) -> Self {
        Self {
            bloch,
            plus: bloch.projector(1),
            minus: bloch.projector(-1),
        }
    }

    pub fn get(&self, outcome: i8) -> &ComplexMatrix {
        if outcome >= 0 {
            &self.plus
        } else {
            &self.minus
        }
    }
}

/// Two-qubit state induced by conditioning the map on one outcome.
#[derive(Debug, Clone)]
pub struct InducedState {
    pub state: ComplexMatrix,
    pub prob: f64,
    pub conditioned_on: (System, i8),
}

impl InducedState {
    pub fn labels(&self) -> [&'static str; 2] {
        self.conditioned_on.0.remaining()
    }

    pub fn negativity(&self) -> Result<f64> {
        negativity_two_qubit(&self.state)
    }
}

/// Unnormalized `Tr_sys[(Π ⊗ I) τ]` for `sys` ∈ {C, B}.
pub(crate) fn condition_unnormalized(
    tau: &ComplexMatrix,
    system: System,
    proj: &ComplexMatrix,
) -> ComplexMatrix {
    let pos = system.position();
    let shift = 2 - pos;
    let rest: Vec<usize> = (0..3).filter(|&p| p != pos).collect();
    let expand = |compact: usize, s: usize| -> usize {
        let hi = (compact >> 1) & 1;
        let lo = compact & 1;
        (hi << (2 - rest[0])) | (lo << (2 - rest[1])) | (s << shift)
    };
    let mut out = ComplexMatrix::zeros(4);
    for x in 0..4 {
        for y in 0..4 {
            let mut acc = Complex64::new(0.0, 0.0);
            // Σ_{s,s'} Π[s, s'] τ[(s', x), (s, y)]
            for s in 0..2 {
                for sp in 0..2 {
                    let p = proj[(s, sp)];
                    if p != Complex64::new(0.0, 0.0) {
                        acc += p * tau[(expand(x, sp), expand(y, s))];
                    }
                }
            }
            out[(x, y)] = acc;
        }
    }
    out
}

/// Conditions the map on outcome `proj` of a measurement on C or B.
pub fn induced_state(
    map: &CausalMap,
    system: System,
    proj: &ComplexMatrix,
    outcome: i8,
) -> Result<InducedState> {
    if system == System::D {
        return Err(Error::Argument(
            "use prepared_state_cb for preparations on D".into(),
        ));
    }
    if proj.dim() != 2 {
        return Err(Error::Argument("measurement operator must be 2x2".into()));
    }
    let raw = condition_unnormalized(map.tau(), system, proj);
    let prob = raw.trace().re;
    if prob < ZERO_PROBABILITY {
        return Err(Error::ZeroProbability {
            system: system.label().into(),
            outcome,
            probability: prob,
        });
    }
    Ok(InducedState {
        state: raw.scale(1.0 / prob),
        prob,
        conditioned_on: (system, outcome),
    })
}

/// State on `C ⊗ B` produced by preparing `d_proj` on D; weighted 1/2 per preparation.
pub fn prepared_state_cb(
    map: &CausalMap,
    d_proj: &ComplexMatrix,
    outcome: i8,
) -> Result<InducedState> {
    Ok(InducedState {
        state: map.apply(d_proj)?,
        prob: 0.5,
        conditioned_on: (System::D, outcome),
    })
}

/// `(Tr|T_Y(ρ)| - 1) / 2` for a two-qubit state, transposing the second qubit.
pub(crate) fn negativity_two_qubit(state: &ComplexMatrix) -> Result<f64> {
    let layout = SubsystemLayout::new(&["X", "Y"])?;
    negativity(state, &layout, "Y")
}

/// Negativity across the cut that transposes `cut_on`.
pub fn negativity(state: &ComplexMatrix, layout: &SubsystemLayout, cut_on: &str) -> Result<f64> {
    let tr = state.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return Err(Error::Argument(format!(
            "negativity needs a trace-one state, trace is {tr}"
        )));
    }
    let pt = partial_transpose(state, layout, cut_on)?;
    let n = (trace_norm(&pt)? - 1.0) / 2.0;
    Ok(if n < NEGATIVITY_FLOOR { 0.0 } else { n })
}

/// `⟨σx ⊗ σy⟩ - ⟨σx ⊗ I⟩⟨I ⊗ σy⟩` on a state over `[C, D]`.
pub fn covariance_xy(state: &InducedState) -> Result<f64> {
    if state.labels() != ["C", "D"] {
        return Err(Error::Argument(format!(
            "covariance needs a state on [C, D], got {:?}",
            state.labels()
        )));
    }
    Ok(covariance_xy_matrix(&state.state))
}

pub(crate) fn covariance_xy_matrix(rho: &ComplexMatrix) -> f64 {
    let xy = pauli::x().kron(&pauli::y());
    let xi = pauli::x().kron(&pauli::identity());
    let iy = pauli::identity().kron(&pauli::y());
    let e = |op: &ComplexMatrix| rho.trace_product(op).re;
    e(&xy) - e(&xi) * e(&iy)
}

/// `2 Σ_b b P(b)² cov(τ^b_CD)` for a σz measurement on B.
pub fn c_cd_witness(map: &CausalMap) -> f64 {
    let pair = ProjectivePair::new(BlochVector::Z);
    [1i8, -1]
        .into_iter()
        .map(|b| {
            let raw = condition_unnormalized(map.tau(), System::B, pair.get(b));
            let prob = raw.trace().re;
            if prob < ZERO_PROBABILITY {
                return 0.0;
            }
            f64::from(b) * prob * prob * covariance_xy_matrix(&raw.scale(1.0 / prob))
        })
        .sum::<f64>()
        * 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_causal_map, partial_swap, phi_plus, FragmentSpec};
    use std::f64::consts::PI;

    fn werner(w: f64) -> ComplexMatrix {
        &phi_plus().scale(w) + &ComplexMatrix::identity(4).scale((1.0 - w) / 4.0)
    }

    #[test]
    fn negativity_examples() {
        assert!((negativity_two_qubit(&phi_plus()).unwrap() - 0.5).abs() < 1e-12);
        let prod = BlochVector::X
            .projector(1)
            .kron(&BlochVector::Y.projector(-1));
        assert_eq!(negativity_two_qubit(&prod).unwrap(), 0.0);
        assert!(negativity_two_qubit(&werner(1.0 / 3.0)).unwrap() < 1e-9);
        // analytic: N = (3w - 1)/4 above the boundary
        assert!((negativity_two_qubit(&werner(0.6)).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn covariance_examples() {
        let wrap = |state| InducedState {
            state,
            prob: 1.0,
            conditioned_on: (System::B, 1),
        };
        let prod = BlochVector::X
            .projector(1)
            .kron(&BlochVector::Y.projector(1));
        assert!(covariance_xy(&wrap(prod)).unwrap().abs() < 1e-15);
        assert!(covariance_xy(&wrap(phi_plus())).unwrap().abs() < 1e-15);
        let s = (&ComplexMatrix::identity(4) + &pauli::x().kron(&pauli::y())).scale(0.25);
        assert!((covariance_xy(&wrap(s)).unwrap() - 1.0).abs() < 1e-15);
        let wrong = InducedState {
            state: phi_plus(),
            prob: 1.0,
            conditioned_on: (System::C, 1),
        };
        assert!(covariance_xy(&wrong).is_err());
    }

    #[test]
    fn induced_states_of_pure_relations() {
        let ce = build_causal_map(&FragmentSpec::with_gate(partial_swap(0.0))).unwrap();
        let st = induced_state(&ce, System::C, &BlochVector::X.projector(1), 1).unwrap();
        assert!((st.prob - 0.5).abs() < 1e-12);
        assert!(st.state.max_abs_diff(&phi_plus()) < 1e-12);

        let cc = build_causal_map(&FragmentSpec::with_gate(partial_swap(PI))).unwrap();
        let proj = BlochVector::from_direction(0.3, 0.4, 0.5)
            .unwrap()
            .projector(-1);
        let st = induced_state(&cc, System::B, &proj, -1).unwrap();
        // τ^b_CD = ρ^b_C ⊗ I/2 with ρ^b_C = Πᵀ (the Φ⁺ steering relation)
        let expected = proj
            .transpose()
            .kron(&ComplexMatrix::identity(2).scale(0.5));
        assert!(st.state.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn zero_probability_outcome_is_reported() {
        let ce = build_causal_map(&FragmentSpec::with_gate(partial_swap(0.0))).unwrap();
        let err = induced_state(&ce, System::B, &ComplexMatrix::zeros(2), 1).unwrap_err();
        assert!(matches!(err, Error::ZeroProbability { .. }));
    }

    #[test]
    fn c_cd_of_pure_relations_vanishes() {
        for theta in [0.0, PI] {
            let m = build_causal_map(&FragmentSpec::with_gate(partial_swap(theta))).unwrap();
            assert!(c_cd_witness(&m).abs() < 1e-12);
        }
    }
}
