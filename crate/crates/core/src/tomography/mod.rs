//! Simulated measure-reprepare-measure tomography of causal maps.
//!
//! C and B are measured in Pauli bases and D is reprepared in one of the six
//! Pauli eigenstates, 54 settings in all. Counts are sampled per setting,
//! inverted to `τ_CBD` by least squares and projected back onto valid causal
//! maps. Exact probabilities can be fed in place of counts (pseudo-counts)
//! and take the same path.

mod bootstrap;
mod fit;
mod io;
mod reconstruct;
mod setting;

pub use bootstrap::{
    bootstrap, bootstrap_thresholds, classify_records, BootstrapOptions, DEFAULT_RESAMPLES,
};
pub use fit::{
    fit_imperfections, fit_theta, predict_from_base, FitResult, FitTarget, Imperfections,
    Prediction, Transform, PREDICTION_RESIDUAL_WARN,
};
pub use io::{read_counts, read_counts_file, write_counts, write_counts_file, COUNTS_HEADER};
pub use reconstruct::{missing_settings, project_to_causal_map, reconstruct, Reconstructor};
pub use setting::{
    basis_label, outcome_probabilities, parse_basis_label, pauli_grid, pseudo_counts,
    sample_counts, simulate_counts, CountRecord, PauliAxis, PauliState, TomographySetting,
    OUTCOMES,
};
