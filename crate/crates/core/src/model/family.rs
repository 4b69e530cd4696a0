//! The parameter families explored by the transitions, and the paradigm settings.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use super::bloch::{eta_axes, BlochVector, ETA_MAX};
use super::causal_map::{build_causal_map, phi_plus, CausalMap, FragmentSpec};
use super::channel::Dephasing;
use super::gate::{delay_gate, partial_swap};
use crate::error::{Error, Result};

/// One point of the combined `(θ, p, q, η)` family: `Φ⁺` on `C ⊗ E`, dephasing
/// with probability `p` along the `η` axes on `E`, `D` and `B`, and the delay
/// gate with phase `θ` and overlap `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyPoint {
    pub theta: f64,
    pub p: f64,
    pub q: f64,
    pub eta: f64,
}

impl Default for FamilyPoint {
    fn default() -> Self {
        Self {
            theta: FRAC_PI_2,
            p: 0.0,
            q: 1.0,
            eta: 0.0,
        }
    }
}

impl FamilyPoint {
    pub fn new(theta: f64, p: f64, q: f64, eta: f64) -> Self {
        Self { theta, p, q, eta }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v, lo, hi) in [("p", self.p, 0.0, 1.0), ("q", self.q, 0.0, 1.0)] {
            if !(lo..=hi).contains(&v) {
                return Err(Error::Argument(format!(
                    "{name} = {v} outside [{lo}, {hi}]"
                )));
            }
        }
        if !self.theta.is_finite() || !self.eta.is_finite() {
            return Err(Error::Argument("theta and eta must be finite".into()));
        }
        Ok(())
    }

    pub fn fragment(&self) -> Result<FragmentSpec> {
        self.validate()?;
        let (n_e, n_d, n_b) = eta_axes(self.eta);
        let gate = if self.q == 1.0 {
            partial_swap(self.theta)
        } else {
            delay_gate(self.theta, self.q)?
        };
        FragmentSpec::new(
            phi_plus(),
            Dephasing::new(n_d, self.p)?,
            Dephasing::new(n_e, self.p)?,
            gate,
            Dephasing::new(n_b, self.p)?,
        )
    }

    pub fn build(&self) -> Result<CausalMap> {
        build_causal_map(&self.fragment()?)
    }
}

/// The four paradigm examples realized by the fragment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Paradigm {
    /// Partial swap at `θ = π/2`, no noise.
    Coh,
    /// Fully distinguishable photons (`q = 0`).
    ProbQ,
    /// Full dephasing along `ŷ` on D, `x̂` on E, `ẑ` on B.
    PhysC,
    /// Full dephasing along `ẑ` on D, E and B.
    ProbC,
}

impl Paradigm {
    pub const ALL: [Paradigm; 4] = [
        Paradigm::Coh,
        Paradigm::ProbQ,
        Paradigm::PhysC,
        Paradigm::ProbC,
    ];

    pub fn fragment(self) -> FragmentSpec {
        let full = |axis| Dephasing::new(axis, 1.0).expect("p = 1 is valid");
        match self {
            Paradigm::Coh => FragmentSpec::with_gate(partial_swap(FRAC_PI_2)),
            Paradigm::ProbQ => {
                FragmentSpec::with_gate(delay_gate(FRAC_PI_2, 0.0).expect("q = 0 is valid"))
            }
            Paradigm::PhysC => FragmentSpec {
                pre_d: full(BlochVector::Y),
                pre_e: full(BlochVector::X),
                post_b: full(BlochVector::Z),
                ..FragmentSpec::with_gate(partial_swap(FRAC_PI_2))
            },
            Paradigm::ProbC => FragmentSpec {
                pre_d: full(BlochVector::Z),
                pre_e: full(BlochVector::Z),
                post_b: full(BlochVector::Z),
                ..FragmentSpec::with_gate(partial_swap(FRAC_PI_2))
            },
        }
    }

    pub fn point(self) -> FamilyPoint {
        match self {
            Paradigm::Coh => FamilyPoint::default(),
            Paradigm::ProbQ => FamilyPoint {
                q: 0.0,
                ..FamilyPoint::default()
            },
            Paradigm::PhysC => FamilyPoint {
                p: 1.0,
                ..FamilyPoint::default()
            },
            Paradigm::ProbC => FamilyPoint {
                p: 1.0,
                eta: ETA_MAX,
                ..FamilyPoint::default()
            },
        }
    }

    pub fn build(self) -> CausalMap {
        build_causal_map(&self.fragment()).expect("paradigm fragments are valid")
    }
}

impl fmt::Display for Paradigm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Paradigm::Coh => "Coh",
            Paradigm::ProbQ => "ProbQ",
            Paradigm::PhysC => "PhysC",
            Paradigm::ProbC => "ProbC",
        };
        f.write_str(s)
    }
}

impl FromStr for Paradigm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "coh" => Ok(Paradigm::Coh),
            "probq" => Ok(Paradigm::ProbQ),
            "physc" => Ok(Paradigm::PhysC),
            "probc" => Ok(Paradigm::ProbC),
            _ => Err(Error::Argument(format!("unknown paradigm `{s}`"))),
        }
    }
}
