//! Numerical simulator for a deterministic single-photon teleportation
//! protocol on single-rail qubits.
//!
//! The protocol is built from three physical primitives, each modeled here
//! without approximation beyond Fock-space truncation:
//!
//! * resonant atom-cavity exchange, used to park a rail's photon in a
//!   two-level atom and to read it back out ([`jc`]),
//! * strong coherent pulses driving that exchange, realizing atomic
//!   rotations whose finite-field error is known in closed form ([`jc`]),
//! * a cross-Kerr probe that reads out two-rail photon parity without
//!   absorbing the signal ([`bell`]).
//!
//! On top of these sit the full Bell-state analyzer ([`bell`]), the
//! teleportation protocol with Bob's correction table ([`teleport`]), and a
//! deterministic gate set (phase, Hadamard, controlled-sign) built from the
//! same hardware primitives ([`gates`]). An independent dense-matrix
//! reference ([`oracle`]) cross-checks the closed-form evolutions.

pub mod bell;
pub mod config;
pub mod error;
pub mod fock;
pub mod gates;
pub mod jc;
pub mod oracle;
pub mod teleport;

pub use error::SimError;
