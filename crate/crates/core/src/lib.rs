//! Causal relations between two time-ordered qubits.
//!
//! A causal map `E_CB|D` takes an input qubit `D` to outputs `C` and `B`; it is
//! stored as its trace-one Choi state `τ_CBD`. The crate builds such maps from
//! a circuit fragment (initial state on `C ⊗ E`, dephasing, a partial-swap or
//! delay-mixture gate), evaluates the witnesses that distinguish cause-effect,
//! common-cause and coherent combinations of the two, classifies maps, and
//! simulates finite-shot tomography of them.
//!
//! Modules:
//! - [`linalg`]: dense complex matrices, partial trace/transpose, Jacobi eigensolver.
//! - [`model`]: states, gates, channels and [`model::CausalMap`] construction.
//! - [`witness`]: induced states, negativities, `C_CD`, basis searches, classification.
//! - [`tomography`]: outcome statistics, sampling, reconstruction and fits.
//! - [`sweep`]: the parameter sweeps and their CSV/JSON output.

pub mod error;
pub mod linalg;
pub mod model;
pub mod optim;
pub mod sweep;
pub mod tomography;
pub mod witness;

pub use error::{Error, Result};
