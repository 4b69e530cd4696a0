use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pauli, ComplexMatrix};

const UNIT_TOL: f64 = 1e-9;

/// Unit vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    pub const X: BlochVector = BlochVector {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    pub const Y: BlochVector = BlochVector {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    pub const Z: BlochVector = BlochVector {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::Argument(format!(
                "Bloch vector ({x}, {y}, {z}) has norm {norm}, expected 1"
            )));
        }
        Ok(Self { x, y, z })
    }

    /// Normalizes an arbitrary nonzero direction.
    pub fn from_direction(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm.is_finite() && norm > 1e-300) {
            return Err(Error::Argument("cannot normalize a zero direction".into()));
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Direction with polar angle `theta` from +z and azimuth `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    /// `(polar, azimuth)` angles.
    pub fn to_spherical(&self) -> (f64, f64) {
        (self.z.clamp(-1.0, 1.0).acos(), self.y.atan2(self.x))
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn negate(&self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        let [a, b, c] = self.components();
        let [d, e, f] = other.components();
        ((a - d).powi(2) + (b - e).powi(2) + (c - f).powi(2)).sqrt()
    }

    /// `n̂·σ⃗`
    pub fn sigma(&self) -> ComplexMatrix {
        let mut m = pauli::x().scale(self.x);
        m = &m + &pauli::y().scale(self.y);
        &m + &pauli::z().scale(self.z)
    }

    /// Projector onto the `sign`·n̂ eigenstate, `(I + sign n̂·σ⃗)/2`.
    pub fn projector(&self, sign: i8) -> ComplexMatrix {
        let s = if sign >= 0 { 1.0 } else { -1.0 };
        (&pauli::identity() + &self.sigma().scale(s)).scale(0.5)
    }

    /// Pure-state vector of the +n̂ eigenstate.
    pub fn ket(&self) -> [Complex64; 2] {
        let (theta, phi) = self.to_spherical();
        [
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        ]
    }
}

impl TryFrom<[f64; 3]> for BlochVector {
    type Error = Error;

    fn try_from([x, y, z]: [f64; 3]) -> Result<Self> {
        BlochVector::new(x, y, z)
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(v: BlochVector) -> Self {
        v.components()
    }
}

/// Dephasing axes `(n_E, n_D, n_B)` of the one-parameter family interpolating
/// from `(x̂, -ŷ, ẑ)` at `eta = 0` to `(ẑ, ẑ, ẑ)` at `eta = π/4`.
pub fn eta_axes(eta: f64) -> (BlochVector, BlochVector, BlochVector) {
    let (s, c) = (2.0 * eta).sin_cos();
    let n_e = BlochVector { x: c, y: 0.0, z: s };
    let n_d = BlochVector {
        x: c * s,
        y: -c,
        z: s * s,
    };
    debug_assert!(((n_d.x.powi(2) + n_d.y.powi(2) + n_d.z.powi(2)).sqrt() - 1.0).abs() < UNIT_TOL);
    (n_e, n_d, BlochVector::Z)
}

/// Upper end of the meaningful `eta` range.
pub const ETA_MAX: f64 = FRAC_PI_4;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_unit() {
        assert!(BlochVector::new(1.0, 1.0, 0.0).is_err());
        assert!(BlochVector::new(0.6, 0.8, 0.0).is_ok());
    }

    #[test]
    fn eta_endpoints() {
        let (e, d, b) = eta_axes(0.0);
        assert!(e.distance(&BlochVector::X) < 1e-15);
        assert!(d.distance(&BlochVector::Y.negate()) < 1e-15);
        assert!(b.distance(&BlochVector::Z) < 1e-15);
        let (e, d, b) = eta_axes(FRAC_PI_4);
        for v in [e, d, b] {
            assert!(v.distance(&BlochVector::Z) < 1e-15);
        }
    }

    #[test]
    fn projectors_are_complete_and_orthogonal() {
        let n = BlochVector::from_direction(0.3, -0.5, 0.8).unwrap();
        let (p, m) = (n.projector(1), n.projector(-1));
        assert!((&p + &m).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!((&p * &p).max_abs_diff(&p) < 1e-15);
        assert!(p.trace_product(&m).norm() < 1e-15);
    }

    #[test]
    fn ket_matches_projector() {
        let n = BlochVector::from_direction(-0.2, 0.7, -0.4).unwrap();
        let k = n.ket();
        assert!(ComplexMatrix::outer(&k).max_abs_diff(&n.projector(1)) < 1e-14);
    }

    #[test]
    fn spherical_round_trip() {
        let n = BlochVector::from_direction(0.1, -0.9, 0.3).unwrap();
        let (t, p) = n.to_spherical();
        assert!(BlochVector::from_spherical(t, p).distance(&n) < 1e-14);
    }
}
