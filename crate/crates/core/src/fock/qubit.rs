//! Logical single-rail qubit amplitudes and the Bell-state labels.
//!
//! A single-rail qubit stores quantum information in the photon number of one
//! mode: logical |0> is the vacuum, logical |1> is the one-photon state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// Tolerance on |a|² + |b|² for accepting qubit amplitudes.
pub const QUBIT_NORM_TOL: f64 = 1e-12;

/// Normalized logical qubit a|0> + b|1> carried on one rail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleRailQubit {
    a: Complex64,
    b: Complex64,
}

impl SingleRailQubit {
    /// Accepts amplitudes whose norm² is within [`QUBIT_NORM_TOL`] of 1, then
    /// stores them renormalized so downstream fidelity checks see an exactly
    /// unit-norm target.
    pub fn new(a: Complex64, b: Complex64) -> Result<Self, SimError> {
        let norm_sqr = a.norm_sqr() + b.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > QUBIT_NORM_TOL {
            return Err(SimError::QubitNotNormalized {
                norm_sqr,
                tol: QUBIT_NORM_TOL,
            });
        }
        let scale = norm_sqr.sqrt().recip();
        Ok(Self {
            a: a * scale,
            b: b * scale,
        })
    }

    /// Bloch-sphere form cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        let half = theta / 2.0;
        Self {
            a: Complex64::new(half.cos(), 0.0),
            b: Complex64::from_polar(half.sin(), phi),
        }
    }

    pub fn ket_zero() -> Self {
        Self {
            a: Complex64::ONE,
            b: Complex64::ZERO,
        }
    }

    pub fn ket_one() -> Self {
        Self {
            a: Complex64::ZERO,
            b: Complex64::ONE,
        }
    }

    /// Vacuum amplitude.
    pub fn a(&self) -> Complex64 {
        self.a
    }

    /// One-photon amplitude.
    pub fn b(&self) -> Complex64 {
        self.b
    }
}

/// The four maximally entangled two-rail states.
///
/// In photon-number notation over two rails:
/// psi± = (|01> ± |10>)/√2 (one photon shared), phi± = (|00> ± |11>)/√2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellKind {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PsiPlus,
        BellKind::PsiMinus,
        BellKind::PhiPlus,
        BellKind::PhiMinus,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
        }
    }

    /// Position in [`Self::ALL`]; used for confusion-matrix rows and columns.
    pub fn index(&self) -> usize {
        match self {
            BellKind::PsiPlus => 0,
            BellKind::PsiMinus => 1,
            BellKind::PhiPlus => 2,
            BellKind::PhiMinus => 3,
        }
    }

    /// Whether the total photon number of the pair is odd (psi±) or even (phi±).
    pub fn has_odd_photon_parity(&self) -> bool {
        matches!(self, BellKind::PsiPlus | BellKind::PsiMinus)
    }
}

impl std::fmt::Display for BellKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}
