//! Truncated Fock-space state machinery: layouts, state vectors, logical
//! qubits, and the standard state constructors.

mod layout;
mod qubit;
mod state;

pub use layout::{HilbertLayout, SubsystemSpec, DEFAULT_AMPLITUDE_LIMIT};
pub use qubit::{BellKind, SingleRailQubit, QUBIT_NORM_TOL};
pub use state::{
    make_atom_ground, make_basis_state, make_bell, make_coherent, make_qubit_state, make_vacuum,
    recommended_coherent_cutoff, CoherentPrep, MeasurementOutcome, StateVector,
    COHERENT_DEFICIT_WARN, DEFINITE_TOL, MEASUREMENT_FLOOR, NORM_TOL,
};
