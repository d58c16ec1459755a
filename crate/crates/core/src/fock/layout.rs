//! Composite Hilbert-space bookkeeping: subsystem kinds, dimensions, strides.
//!
//! Basis ordering is row-major over the subsystem list: the first subsystem
//! varies slowest. For a layout `[mode(2), atom]` the basis order is
//! |0,g>, |0,e>, |1,g>, |1,e>, and the stride of subsystem `i` is the product
//! of the dimensions of all later subsystems.

use serde::{Deserialize, Serialize};

use crate::error::SimError;

/// Hard ceiling on the amplitude count of any composite state.
pub const DEFAULT_AMPLITUDE_LIMIT: usize = 1 << 24;

/// One factor of a tensor-product space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubsystemSpec {
    /// Bosonic mode truncated to Fock levels `0..cutoff` (dimension `cutoff`).
    FockMode { cutoff: usize },
    /// Two-level atom; basis order is (g, e).
    Atom,
}

impl SubsystemSpec {
    pub fn dim(&self) -> usize {
        match self {
            SubsystemSpec::FockMode { cutoff } => *cutoff,
            SubsystemSpec::Atom => 2,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SubsystemSpec::FockMode { .. } => "a Fock mode",
            SubsystemSpec::Atom => "an atom",
        }
    }

    /// Human-readable label for basis level `k` ("g"/"e" for atoms, the
    /// photon number for modes).
    pub fn level_label(&self, k: usize) -> String {
        match self {
            SubsystemSpec::FockMode { .. } => k.to_string(),
            SubsystemSpec::Atom => if k == 0 { "g" } else { "e" }.to_string(),
        }
    }
}

/// Ordered subsystem list defining a composite basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertLayout {
    subsystems: Vec<SubsystemSpec>,
}

impl HilbertLayout {
    /// Builds a layout, rejecting composites above [`DEFAULT_AMPLITUDE_LIMIT`].
    pub fn new(subsystems: Vec<SubsystemSpec>) -> Result<Self, SimError> {
        Self::with_limit(subsystems, DEFAULT_AMPLITUDE_LIMIT)
    }

    /// Builds a layout against a caller-chosen amplitude ceiling.
    pub fn with_limit(subsystems: Vec<SubsystemSpec>, limit: usize) -> Result<Self, SimError> {
        let mut dim: usize = 1;
        for s in &subsystems {
            if s.dim() == 0 {
                return Err(SimError::CutoffTooSmall {
                    cutoff: 0,
                    required: 1,
                });
            }
            dim = dim.checked_mul(s.dim()).unwrap_or(usize::MAX);
            if dim > limit {
                return Err(SimError::DimensionLimit {
                    requested: dim,
                    limit,
                });
            }
        }
        Ok(Self { subsystems })
    }

    pub fn subsystem_count(&self) -> usize {
        self.subsystems.len()
    }

    pub fn subsystems(&self) -> &[SubsystemSpec] {
        &self.subsystems
    }

    pub fn spec(&self, index: usize) -> Result<SubsystemSpec, SimError> {
        self.subsystems
            .get(index)
            .copied()
            .ok_or(SimError::SubsystemOutOfRange {
                index,
                count: self.subsystems.len(),
            })
    }

    /// Total composite dimension (product of subsystem dimensions).
    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim()).product()
    }

    /// Dimension of one subsystem. Panics on a bad index; use [`Self::spec`]
    /// for validated access.
    pub fn dim_of(&self, index: usize) -> usize {
        self.subsystems[index].dim()
    }

    /// Stride of subsystem `index`: the product of all later dimensions.
    pub fn stride_of(&self, index: usize) -> usize {
        self.subsystems[index + 1..].iter().map(|s| s.dim()).product()
    }

    /// Component of `basis_index` along subsystem `index`.
    pub fn component(&self, basis_index: usize, index: usize) -> usize {
        (basis_index / self.stride_of(index)) % self.dim_of(index)
    }

    /// Flat basis index for a full component tuple.
    pub fn basis_index(&self, components: &[usize]) -> Result<usize, SimError> {
        if components.len() != self.subsystems.len() {
            return Err(SimError::SubsystemOutOfRange {
                index: components.len(),
                count: self.subsystems.len(),
            });
        }
        let mut idx = 0;
        for (i, (&c, s)) in components.iter().zip(&self.subsystems).enumerate() {
            if c >= s.dim() {
                return Err(SimError::ComponentOutOfRange {
                    index: i,
                    component: c,
                    dim: s.dim(),
                });
            }
            idx = idx * s.dim() + c;
        }
        Ok(idx)
    }

    /// Layout with `spec` appended as the new last subsystem.
    pub fn appended(&self, spec: SubsystemSpec) -> Result<Self, SimError> {
        let mut subs = self.subsystems.clone();
        subs.push(spec);
        Self::new(subs)
    }

    /// Layout with subsystem `index` removed.
    pub fn removed(&self, index: usize) -> Result<Self, SimError> {
        self.spec(index)?;
        let mut subs = self.subsystems.clone();
        subs.remove(index);
        Ok(Self { subsystems: subs })
    }

    /// Cutoff of the Fock mode at `index`; errors if it is not a mode.
    pub fn expect_mode(&self, index: usize) -> Result<usize, SimError> {
        match self.spec(index)? {
            SubsystemSpec::FockMode { cutoff } => Ok(cutoff),
            other => Err(SimError::SubsystemKind {
                index,
                expected: "a Fock mode",
                found: other.kind_name(),
            }),
        }
    }

    /// Confirms the subsystem at `index` is an atom.
    pub fn expect_atom(&self, index: usize) -> Result<(), SimError> {
        match self.spec(index)? {
            SubsystemSpec::Atom => Ok(()),
            other => Err(SimError::SubsystemKind {
                index,
                expected: "an atom",
                found: other.kind_name(),
            }),
        }
    }

    /// Ket-style label for a flat basis index, e.g. `|1,g,0>`.
    pub fn basis_label(&self, basis_index: usize) -> String {
        let parts: Vec<String> = (0..self.subsystems.len())
            .map(|i| self.subsystems[i].level_label(self.component(basis_index, i)))
            .collect();
        format!("|{}>", parts.join(","))
    }
}
