//! States, gates and channels of the circuit fragment, and the causal maps they realize.

mod bloch;
mod causal_map;
mod channel;
mod family;
mod gate;

pub use bloch::{eta_axes, BlochVector, ETA_MAX};
pub use causal_map::{
    apply_map, build_causal_map, phi_plus, validate_density, CausalMap, FragmentSpec,
    MapDiagnostics, MapJson, Provenance, MAP_LABELS, MAP_TOL,
};
pub use channel::{dephasing, Dephasing, QubitChannel};
pub use family::{FamilyPoint, Paradigm};
pub use gate::{delay_gate, partial_swap, q_from_delay, TwoQubitGate};
