//! Dense-matrix reference evolution, independent of every closed-form
//! shortcut in the simulator.
//!
//! Hamiltonians are assembled from primitive ladder operators placed by
//! subsystem index, then exponentiated through an exact Hermitian
//! eigendecomposition. Nothing here shares code with the production
//! evolution paths, so agreement between the two is a real cross-check.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::SimError;
use crate::fock::{HilbertLayout, StateVector};

/// Largest composite dimension the dense reference will exponentiate.
pub const ORACLE_DIM_LIMIT: usize = 4096;

/// Maximum allowed entry of |H - H†| before evolution refuses to run.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Allowed drift of norm² across one exact evolution.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Dense operator tied to a specific layout.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    layout: HilbertLayout,
    matrix: DMatrix<Complex64>,
}

impl OperatorMatrix {
    fn check_dim(layout: &HilbertLayout) -> Result<usize, SimError> {
        let dim = layout.total_dim();
        if dim > ORACLE_DIM_LIMIT {
            return Err(SimError::OracleDimension {
                dim,
                limit: ORACLE_DIM_LIMIT,
            });
        }
        Ok(dim)
    }

    pub fn identity(layout: HilbertLayout) -> Result<Self, SimError> {
        let dim = Self::check_dim(&layout)?;
        Ok(Self {
            layout,
            matrix: DMatrix::identity(dim, dim),
        })
    }

    /// Embeds a d×d local operator (row-major) on one subsystem, identity on
    /// the rest.
    pub fn from_local(
        layout: HilbertLayout,
        index: usize,
        local: &[Complex64],
    ) -> Result<Self, SimError> {
        let dim = Self::check_dim(&layout)?;
        let d = layout.spec(index)?.dim();
        if local.len() != d * d {
            return Err(SimError::AmplitudeLength {
                got: local.len(),
                expected: d * d,
            });
        }
        let stride = layout.stride_of(index);
        let block = d * stride;
        let mut matrix = DMatrix::zeros(dim, dim);
        // Nonzero entries connect indices that differ only in this
        // subsystem's component: i = high·block + r·stride + low.
        for high in 0..dim / block {
            for low in 0..stride {
                let base = high * block + low;
                for r in 0..d {
                    for c in 0..d {
                        let v = local[r * d + c];
                        if v != Complex64::ZERO {
                            matrix[(base + r * stride, base + c * stride)] = v;
                        }
                    }
                }
            }
        }
        Ok(Self { layout, matrix })
    }

    /// Annihilation operator on a Fock mode: a|n> = sqrt(n)|n-1>.
    pub fn annihilation(layout: HilbertLayout, mode: usize) -> Result<Self, SimError> {
        let cutoff = layout.expect_mode(mode)?;
        let mut local = vec![Complex64::ZERO; cutoff * cutoff];
        for n in 1..cutoff {
            local[(n - 1) * cutoff + n] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        Self::from_local(layout, mode, &local)
    }

    /// Creation operator on a Fock mode (adjoint of annihilation).
    pub fn creation(layout: HilbertLayout, mode: usize) -> Result<Self, SimError> {
        Ok(Self::annihilation(layout, mode)?.adjoint())
    }

    /// Photon-number operator on a Fock mode.
    pub fn number(layout: HilbertLayout, mode: usize) -> Result<Self, SimError> {
        let cutoff = layout.expect_mode(mode)?;
        let mut local = vec![Complex64::ZERO; cutoff * cutoff];
        for n in 0..cutoff {
            local[n * cutoff + n] = Complex64::new(n as f64, 0.0);
        }
        Self::from_local(layout, mode, &local)
    }

    /// Atomic lowering operator |g><e|.
    pub fn atom_lower(layout: HilbertLayout, atom: usize) -> Result<Self, SimError> {
        layout.expect_atom(atom)?;
        let local = [
            Complex64::ZERO,
            Complex64::ONE,
            Complex64::ZERO,
            Complex64::ZERO,
        ];
        Self::from_local(layout, atom, &local)
    }

    /// Atomic raising operator |e><g|.
    pub fn atom_raise(layout: HilbertLayout, atom: usize) -> Result<Self, SimError> {
        Ok(Self::atom_lower(layout, atom)?.adjoint())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            layout: self.layout.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        self.matrix *= factor;
        self
    }

    pub fn add(&self, other: &Self) -> Result<Self, SimError> {
        if self.layout != other.layout {
            return Err(SimError::LayoutMismatch);
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self, SimError> {
        if self.layout != other.layout {
            return Err(SimError::LayoutMismatch);
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn max_hermiticity_violation(&self) -> f64 {
        let adj = self.matrix.adjoint();
        (&self.matrix - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Exchange Hamiltonian between one atom and one mode, H = γ(σ⁻a† + σ⁺a),
/// in units where ħ = 1.
pub fn build_jc_hamiltonian(
    layout: &HilbertLayout,
    atom: usize,
    mode: usize,
    gamma: f64,
) -> Result<OperatorMatrix, SimError> {
    let lower = OperatorMatrix::atom_lower(layout.clone(), atom)?;
    let raise = OperatorMatrix::atom_raise(layout.clone(), atom)?;
    let a = OperatorMatrix::annihilation(layout.clone(), mode)?;
    let adag = OperatorMatrix::creation(layout.clone(), mode)?;
    let g = Complex64::new(gamma, 0.0);
    lower.mul(&adag)?.add(&raise.mul(&a)?).map(|h| h.scaled(g))
}

/// Cross-Kerr Hamiltonian H = κ(n_a + n_b)·n_probe, in units where ħ = 1.
pub fn build_kerr_hamiltonian(
    layout: &HilbertLayout,
    mode_a: usize,
    mode_b: usize,
    probe: usize,
    kappa: f64,
) -> Result<OperatorMatrix, SimError> {
    let na = OperatorMatrix::number(layout.clone(), mode_a)?;
    let nb = OperatorMatrix::number(layout.clone(), mode_b)?;
    let np = OperatorMatrix::number(layout.clone(), probe)?;
    let k = Complex64::new(kappa, 0.0);
    na.add(&nb)?.mul(&np).map(|h| h.scaled(k))
}

/// Evolves a state by exp(-iHt) through an exact Hermitian
/// eigendecomposition. Refuses non-Hermitian input and reports any
/// unitarity loss.
pub fn evolve_exact(
    hamiltonian: &OperatorMatrix,
    t: f64,
    state: &StateVector,
) -> Result<StateVector, SimError> {
    if hamiltonian.layout != *state.layout() {
        return Err(SimError::LayoutMismatch);
    }
    let deviation = hamiltonian.max_hermiticity_violation();
    if deviation > HERMITICITY_TOL {
        return Err(SimError::NotHermitian { deviation });
    }
    let dim = hamiltonian.matrix.nrows();
    let eig = hamiltonian.matrix.clone().symmetric_eigen();

    // c = V†ψ, then ψ(t) = V diag(e^{-iEt}) c.
    let psi = nalgebra::DVector::from_column_slice(state.amplitudes());
    let mut coeffs = eig.eigenvectors.adjoint() * psi;
    for k in 0..dim {
        coeffs[k] *= Complex64::from_polar(1.0, -eig.eigenvalues[k] * t);
    }
    let evolved = &eig.eigenvectors * coeffs;

    let out_amps: Vec<Complex64> = evolved.iter().copied().collect();
    let norm_sqr: f64 = out_amps.iter().map(|a| a.norm_sqr()).sum();
    let drift = (norm_sqr - state.norm_sqr()).abs();
    if drift > UNITARITY_TOL {
        return Err(SimError::UnitarityLoss { drift });
    }
    Ok(StateVector::from_parts(state.layout().clone(), out_amps))
}
