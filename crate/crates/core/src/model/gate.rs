use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{pauli, ComplexMatrix};

const UNITARY_TOL: f64 = 1e-10;
const WEIGHT_TOL: f64 = 1e-12;

/// Two-qubit gate from inputs `D ⊗ E` to outputs `B ⊗ F`.
///
/// The identity matrix wires `D → B` and `E → F`; the swap wires `D → F` and `E → B`.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoQubitGate {
    Unitary(ComplexMatrix),
    /// Convex combination `Σ w U (·) U†`.
    Mixture(Vec<(f64, ComplexMatrix)>),
}

fn check_unitary(u: &ComplexMatrix) -> Result<()> {
    if u.dim() != 4 {
        return Err(Error::Argument(format!(
            "two-qubit gate must be 4x4, got {}",
            u.dim()
        )));
    }
    let defect = (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(4));
    if defect > UNITARY_TOL {
        return Err(Error::Contract(format!(
            "gate is not unitary (|U†U - I| = {defect:e})"
        )));
    }
    Ok(())
}

impl TwoQubitGate {
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        check_unitary(&u)?;
        Ok(TwoQubitGate::Unitary(u))
    }

    pub fn mixture(terms: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Argument(
                "gate mixture needs at least one term".into(),
            ));
        }
        let mut total = 0.0;
        for (w, u) in &terms {
            if *w < 0.0 || !w.is_finite() {
                return Err(Error::Argument(format!("negative mixture weight {w}")));
            }
            check_unitary(u)?;
            total += w;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::Argument(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(TwoQubitGate::Mixture(terms))
    }

    pub fn identity() -> Self {
        TwoQubitGate::Unitary(ComplexMatrix::identity(4))
    }

    pub fn swap() -> Self {
        TwoQubitGate::Unitary(pauli::swap())
    }

    /// Weighted unitary terms; a plain unitary is a single term of weight one.
    pub fn terms(&self) -> Vec<(f64, &ComplexMatrix)> {
        match self {
            TwoQubitGate::Unitary(u) => vec![(1.0, u)],
            TwoQubitGate::Mixture(t) => t.iter().map(|(w, u)| (*w, u)).collect(),
        }
    }

    pub fn is_unitary(&self) -> bool {
        matches!(self, TwoQubitGate::Unitary(_))
    }
}

/// `cos(θ/2) I + i sin(θ/2) SWAP`
pub fn partial_swap(theta: f64) -> TwoQubitGate {
    let (s, c) = (theta / 2.0).sin_cos();
    let u =
        &ComplexMatrix::identity(4).scale(c) + &pauli::swap().scale_complex(Complex64::new(0.0, s));
    TwoQubitGate::Unitary(u)
}

/// Gaussian-pulse overlap `exp(-τ² / (2 τ_coh²))` for a relative delay `tau`.
pub fn q_from_delay(tau: f64, tau_coh: f64) -> Result<f64> {
    if !(tau_coh.is_finite() && tau_coh > 0.0) {
        return Err(Error::Argument(format!(
            "coherence time must be positive, got {tau_coh}"
        )));
    }
    if !tau.is_finite() {
        return Err(Error::Argument(format!("delay must be finite, got {tau}")));
    }
    Ok((-tau * tau / (2.0 * tau_coh * tau_coh)).exp())
}

/// Partial swap applied with probability `q`, otherwise an even mixture of identity and swap.
pub fn delay_gate(theta: f64, q: f64) -> Result<TwoQubitGate> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Argument(format!("overlap q = {q} outside [0, 1]")));
    }
    let TwoQubitGate::Unitary(u) = partial_swap(theta) else {
        unreachable!()
    };
    let half = (1.0 - q) / 2.0;
    TwoQubitGate::mixture(vec![
        (q, u),
        (half, ComplexMatrix::identity(4)),
        (half, pauli::swap()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn unitary(g: &TwoQubitGate) -> &ComplexMatrix {
        match g {
            TwoQubitGate::Unitary(u) => u,
            _ => panic!("expected unitary"),
        }
    }

    #[test]
    fn partial_swap_endpoints() {
        assert!(unitary(&partial_swap(0.0)).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        let i_swap = pauli::swap().scale_complex(Complex64::new(0.0, 1.0));
        assert!(unitary(&partial_swap(PI)).max_abs_diff(&i_swap) < 1e-15);
    }

    #[test]
    fn square_root_of_swap() {
        let u = unitary(&partial_swap(FRAC_PI_2)).clone();
        let expected = (&ComplexMatrix::identity(4)
            + &pauli::swap().scale_complex(Complex64::new(0.0, 1.0)))
            .scale(std::f64::consts::FRAC_1_SQRT_2);
        assert!(u.max_abs_diff(&expected) < 1e-15);
        let sq = &u * &u;
        let i_swap = pauli::swap().scale_complex(Complex64::new(0.0, 1.0));
        assert!(sq.max_abs_diff(&i_swap) < 1e-15);
    }

    #[test]
    fn overlap_from_delay() {
        assert_eq!(q_from_delay(0.0, 0.189).unwrap(), 1.0);
        assert!((q_from_delay(0.189, 0.189).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        assert!(q_from_delay(100.0, 0.189).unwrap() < 1e-300);
        assert!(q_from_delay(1.0, 0.0).is_err());
        assert!(q_from_delay(1.0, -1.0).is_err());
    }

    #[test]
    fn delay_gate_weights() {
        let g = delay_gate(FRAC_PI_2, 0.5).unwrap();
        let w: Vec<f64> = g.terms().iter().map(|(w, _)| *w).collect();
        assert_eq!(w, vec![0.5, 0.25, 0.25]);
        let g = delay_gate(1.0, 0.0).unwrap();
        let t = g.terms();
        assert_eq!(t[0].0, 0.0);
        assert!(t[2].1.max_abs_diff(&pauli::swap()) < 1e-15);
        assert!(delay_gate(1.0, 1.2).is_err());
    }

    #[test]
    fn mixture_validation() {
        assert!(TwoQubitGate::mixture(vec![(0.4, ComplexMatrix::identity(4))]).is_err());
        assert!(TwoQubitGate::mixture(vec![(1.0, ComplexMatrix::identity(4).scale(2.0))]).is_err());
    }
}
