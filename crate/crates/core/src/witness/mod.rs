//! Induced states, negativity and covariance witnesses, basis searches and classification.

mod classify;
mod induced;
mod search;

pub use classify::{
    classify, classify_with, entanglement_breaking_flags, search_bases, CausalClass, ClassFlags,
    OutcomePair, PathwayBases, ReportJson, Thresholds, WitnessErrors, WitnessReport, WitnessValues,
    DEFAULT_EPSILON,
};
pub use induced::{
    c_cd_witness, covariance_xy, induced_state, negativity, prepared_state_cb, InducedState,
    ProjectivePair, System, NEGATIVITY_FLOOR, ZERO_PROBABILITY,
};
pub use search::{
    hemisphere_grid, outcome_negativities, pathway_value, search, search_berkson,
    search_pathway_cc, search_pathway_ce, Pathway, SearchOptions, SearchResult,
};
