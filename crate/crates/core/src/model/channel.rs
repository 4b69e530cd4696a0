use num_complex::Complex64;

use super::bloch::BlochVector;
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, partial_trace, ComplexMatrix, SubsystemLayout};

const CHANNEL_TOL: f64 = 1e-10;

/// Single-qubit CPTP map stored as its trace-one Choi matrix on output ⊗ input.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitChannel {
    choi: ComplexMatrix,
}

impl QubitChannel {
    pub fn identity() -> Self {
        Self::from_kraus(&[ComplexMatrix::identity(2)])
    }

    /// `ρ ↦ Σ K ρ K†`
    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Self {
        // choi = 1/2 Σ_ij E(|i><j|) ⊗ |i><j|
        let mut choi = ComplexMatrix::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                let mut eij = ComplexMatrix::zeros(2);
                eij[(i, j)] = Complex64::new(1.0, 0.0);
                let mut image = ComplexMatrix::zeros(2);
                for k in kraus {
                    image = &image + &eij.conjugate_by(k);
                }
                for a in 0..2 {
                    for b in 0..2 {
                        choi[(a * 2 + i, b * 2 + j)] = image[(a, b)] * 0.5;
                    }
                }
            }
        }
        Self { choi }
    }

    /// Validates complete positivity and trace preservation.
    pub fn from_choi(choi: ComplexMatrix) -> Result<Self> {
        if choi.dim() != 4 {
            return Err(Error::Argument(
                "qubit channel Choi matrix must be 4x4".into(),
            ));
        }
        let lam = min_eigenvalue(&choi)?;
        if lam < -CHANNEL_TOL {
            return Err(Error::Contract(format!(
                "channel Choi matrix not PSD (λ_min = {lam:e})"
            )));
        }
        let layout = SubsystemLayout::new(&["out", "in"])?;
        let marginal = partial_trace(&choi, &layout, &["in"])?;
        let defect = marginal.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5));
        if defect > CHANNEL_TOL {
            return Err(Error::Contract(format!(
                "channel not trace preserving (defect {defect:e})"
            )));
        }
        Ok(Self { choi })
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(2);
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..2 {
                    for j in 0..2 {
                        acc += self.choi[(a * 2 + i, b * 2 + j)] * rho[(i, j)];
                    }
                }
                out[(a, b)] = acc * 2.0;
            }
        }
        out
    }

    /// Sequential composition: `self` after `first`.
    pub fn compose(&self, first: &QubitChannel) -> QubitChannel {
        let mut choi = ComplexMatrix::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                let mut eij = ComplexMatrix::zeros(2);
                eij[(i, j)] = Complex64::new(1.0, 0.0);
                let image = self.apply(&first.apply(&eij));
                for a in 0..2 {
                    for b in 0..2 {
                        choi[(a * 2 + i, b * 2 + j)] = image[(a, b)] * 0.5;
                    }
                }
            }
        }
        QubitChannel { choi }
    }
}

/// Dephasing along `n` with probability `p`: `(1 - p/2) ρ + (p/2) (n·σ) ρ (n·σ)`.
pub fn dephasing(n: &BlochVector, p: f64) -> Result<QubitChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Argument(format!(
            "dephasing probability {p} outside [0, 1]"
        )));
    }
    let k0 = ComplexMatrix::identity(2).scale((1.0 - p / 2.0).sqrt());
    let k1 = n.sigma().scale((p / 2.0).sqrt());
    Ok(QubitChannel::from_kraus(&[k0, k1]))
}

/// A dephasing stage of the circuit fragment: axis and probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dephasing {
    pub axis: BlochVector,
    pub p: f64,
}

impl Dephasing {
    pub fn new(axis: BlochVector, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Argument(format!(
                "dephasing probability {p} outside [0, 1]"
            )));
        }
        Ok(Self { axis, p })
    }

    pub fn none() -> Self {
        Self {
            axis: BlochVector::Z,
            p: 0.0,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.p == 0.0
    }

    pub fn channel(&self) -> QubitChannel {
        dephasing(&self.axis, self.p).expect("validated at construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus_state() -> ComplexMatrix {
        BlochVector::X.projector(1)
    }

    #[test]
    fn zero_probability_is_identity() {
        let ch = dephasing(&BlochVector::from_direction(1.0, 2.0, 3.0).unwrap(), 0.0).unwrap();
        assert!(ch.choi().max_abs_diff(QubitChannel::identity().choi()) < 1e-15);
    }

    #[test]
    fn full_z_dephasing_kills_coherence() {
        let ch = dephasing(&BlochVector::Z, 1.0).unwrap();
        let out = ch.apply(&plus_state());
        assert!(out.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
        let zero = BlochVector::Z.projector(1);
        assert!(ch.apply(&zero).max_abs_diff(&zero) < 1e-15);
    }

    #[test]
    fn full_dephasing_idempotent() {
        let n = BlochVector::from_direction(0.4, -0.1, 0.9).unwrap();
        let ch = dephasing(&n, 1.0).unwrap();
        assert!(ch.compose(&ch).choi().max_abs_diff(ch.choi()) < 1e-12);
    }

    #[test]
    fn dephasing_is_valid_channel() {
        let n = BlochVector::from_direction(0.4, -0.1, 0.9).unwrap();
        for p in [0.0, 0.3, 1.0] {
            let ch = dephasing(&n, p).unwrap();
            assert!(QubitChannel::from_choi(ch.choi().clone()).is_ok());
        }
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(dephasing(&BlochVector::Z, 1.5).is_err());
        assert!(dephasing(&BlochVector::Z, -0.1).is_err());
    }

    #[test]
    fn axis_sign_is_irrelevant() {
        let n = BlochVector::from_direction(0.2, 0.3, -0.5).unwrap();
        let a = dephasing(&n, 0.7).unwrap();
        let b = dephasing(&n.negate(), 0.7).unwrap();
        assert!(a.choi().max_abs_diff(b.choi()) < 1e-15);
    }
}
