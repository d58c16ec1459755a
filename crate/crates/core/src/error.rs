//! Crate-wide error type.
//!
//! Every fallible operation in the simulator returns [`SimError`]. Variants
//! carry enough context (indices, populations, tolerances) that a failed
//! protocol run can be diagnosed from the error alone.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("composite dimension {requested} exceeds the amplitude limit {limit}")]
    DimensionLimit { requested: usize, limit: usize },

    #[error("subsystem index {index} out of range for a layout with {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("subsystem {index} is {found}, expected {expected}")]
    SubsystemKind {
        index: usize,
        expected: &'static str,
        found: &'static str,
    },

    #[error("basis component {component} out of range for subsystem {index} of dimension {dim}")]
    ComponentOutOfRange {
        index: usize,
        component: usize,
        dim: usize,
    },

    #[error("states live on different layouts; the operation needs identical subsystem structure")]
    LayoutMismatch,

    #[error("amplitude vector has length {got}, layout dimension is {expected}")]
    AmplitudeLength { got: usize, expected: usize },

    #[error("state norm² = {norm_sqr:.6e} differs from 1 by more than {tol:.1e}")]
    NotNormalized { norm_sqr: f64, tol: f64 },

    #[error("state has vanishing norm (norm² = {norm_sqr:.3e}); nothing to renormalize")]
    ZeroNorm { norm_sqr: f64 },

    #[error("amplitudes contain a non-finite value at basis index {index}")]
    NonFiniteAmplitude { index: usize },

    #[error("mode cutoff must be at least {required}, got {cutoff}")]
    CutoffTooSmall { cutoff: usize, required: usize },

    #[error(
        "population {population:.3e} in the top Fock level of subsystem {index} exceeds \
         {limit:.1e}; the truncated ladder would leak, raise the cutoff"
    )]
    TruncationLeak {
        index: usize,
        population: f64,
        limit: f64,
    },

    #[error(
        "subsystem {index} carries weight {weight:.3e} above level {level}, which this \
         operation cannot represent"
    )]
    UnsupportedLevels {
        index: usize,
        level: usize,
        weight: f64,
    },

    #[error(
        "two-mode photon-number sector {sector} carries weight {weight:.3e}, outside the \
         single-photon subspace this element is defined on"
    )]
    UnsupportedSector { sector: usize, weight: f64 },

    #[error("beam splitter needs equal cutoffs, got {a} and {b}")]
    UnequalCutoffs { a: usize, b: usize },

    #[error("all measurement branches fall below the probability floor {floor:.1e}")]
    DegenerateMeasurement { floor: f64 },

    #[error("subsystem {index} is not in a definite basis state (best level {level} holds only {weight:.6})")]
    NotDefinite {
        index: usize,
        level: usize,
        weight: f64,
    },

    #[error(
        "probe failed to match either parity reference (conditional overlap {overlap:.6} \
         < {threshold}); the Kerr interaction time is off or the cutoff is too low"
    )]
    AmbiguousParity { overlap: f64, threshold: f64 },

    #[error(
        "photon counters fired {n_a} and {n_b} times behind the beam splitter; exactly one \
         click is possible on the odd-parity subspace, so an upstream stage is broken"
    )]
    InvalidClickPattern { n_a: usize, n_b: usize },

    #[error("operator is not Hermitian (max |H - H†| entry = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("exact evolution lost unitarity (norm² drifted by {drift:.3e})")]
    UnitarityLoss { drift: f64 },

    #[error("dense-operator dimension {dim} exceeds the oracle limit {limit}")]
    OracleDimension { dim: usize, limit: usize },

    #[error("qubit amplitudes have norm² = {norm_sqr:.6e}, outside tolerance {tol:.1e} of 1")]
    QubitNotNormalized { norm_sqr: f64, tol: f64 },

    #[error("configuration invalid: {reason}")]
    InvalidConfig { reason: String },
}
