//! Dense state vectors over composite Fock/atom spaces, with the
//! constructors, tensor algebra, and measurement primitives the protocol
//! stages are built from.
//!
//! States are kept normalized: every public operation either preserves the
//! norm (unitaries, phase shifts) or renormalizes after a projection and
//! reports the branch weight separately.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::fock::layout::{HilbertLayout, SubsystemSpec};
use crate::fock::qubit::{BellKind, SingleRailQubit};

/// Acceptance tolerance on norm² for externally supplied amplitude vectors.
pub const NORM_TOL: f64 = 1e-9;

/// Measurement branches below this probability are never selected.
pub const MEASUREMENT_FLOOR: f64 = 1e-15;

/// Population tolerance for "this subsystem is (near) a definite level"
/// checks, e.g. before dropping a subsystem from the layout.
pub const DEFINITE_TOL: f64 = 1e-12;

/// Truncation deficit above which a coherent-state preparation is flagged as
/// under-resolved.
pub const COHERENT_DEFICIT_WARN: f64 = 1e-6;

/// Normalized pure state over a [`HilbertLayout`], amplitudes in row-major
/// basis order (first subsystem varies slowest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateVectorRepr", into = "StateVectorRepr")]
pub struct StateVector {
    layout: HilbertLayout,
    amps: Vec<Complex64>,
}

/// Serialized form: the layout plus interleaved (re, im) amplitude pairs.
#[derive(Serialize, Deserialize)]
struct StateVectorRepr {
    layout: HilbertLayout,
    amplitudes: Vec<f64>,
}

impl From<StateVector> for StateVectorRepr {
    fn from(s: StateVector) -> Self {
        let mut amplitudes = Vec::with_capacity(2 * s.amps.len());
        for a in &s.amps {
            amplitudes.push(a.re);
            amplitudes.push(a.im);
        }
        StateVectorRepr {
            layout: s.layout,
            amplitudes,
        }
    }
}

impl TryFrom<StateVectorRepr> for StateVector {
    type Error = SimError;

    fn try_from(repr: StateVectorRepr) -> Result<Self, SimError> {
        let dim = repr.layout.total_dim();
        if repr.amplitudes.len() != 2 * dim {
            return Err(SimError::AmplitudeLength {
                got: repr.amplitudes.len() / 2,
                expected: dim,
            });
        }
        let amps: Vec<Complex64> = repr
            .amplitudes
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        for (i, a) in amps.iter().enumerate() {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(SimError::NonFiniteAmplitude { index: i });
            }
        }
        Ok(StateVector {
            layout: repr.layout,
            amps,
        })
    }
}

impl StateVector {
    /// Wraps caller-supplied amplitudes after checking length, finiteness,
    /// and normalization within [`NORM_TOL`].
    pub fn from_amplitudes(
        layout: HilbertLayout,
        amps: Vec<Complex64>,
    ) -> Result<Self, SimError> {
        let dim = layout.total_dim();
        if amps.len() != dim {
            return Err(SimError::AmplitudeLength {
                got: amps.len(),
                expected: dim,
            });
        }
        for (i, a) in amps.iter().enumerate() {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(SimError::NonFiniteAmplitude { index: i });
            }
        }
        let s = Self { layout, amps };
        let norm_sqr = s.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(SimError::NotNormalized {
                norm_sqr,
                tol: NORM_TOL,
            });
        }
        Ok(s)
    }

    /// Internal constructor for amplitudes already known to be valid.
    pub(crate) fn from_parts(layout: HilbertLayout, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(layout.total_dim(), amps.len());
        Self { layout, amps }
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Amplitude at a full component tuple.
    pub fn amplitude(&self, components: &[usize]) -> Result<Complex64, SimError> {
        Ok(self.amps[self.layout.basis_index(components)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Rescales to unit norm; errors on a numerically vanished state.
    pub fn renormalized(&self) -> Result<Self, SimError> {
        let norm_sqr = self.norm_sqr();
        if norm_sqr < 1e-30 {
            return Err(SimError::ZeroNorm { norm_sqr });
        }
        let scale = norm_sqr.sqrt().recip();
        let mut out = self.clone();
        for a in &mut out.amps {
            *a *= scale;
        }
        Ok(out)
    }

    /// Tensor product `self ⊗ other`; `other`'s subsystems are appended after
    /// `self`'s.
    pub fn tensor(&self, other: &Self) -> Result<Self, SimError> {
        let mut subs = self.layout.subsystems().to_vec();
        subs.extend_from_slice(other.layout.subsystems());
        let layout = HilbertLayout::new(subs)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { layout, amps })
    }

    /// Inner product `<self|other>`; layouts must match exactly.
    pub fn overlap(&self, other: &Self) -> Result<Complex64, SimError> {
        if self.layout != other.layout {
            return Err(SimError::LayoutMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Squared overlap magnitude |<self|other>|².
    pub fn fidelity_to(&self, other: &Self) -> Result<f64, SimError> {
        Ok(self.overlap(other)?.norm_sqr())
    }

    /// Optical phase shift on one mode: |n> -> e^{i n φ} |n>.
    pub fn apply_phase_shift(&self, mode: usize, phi: f64) -> Result<Self, SimError> {
        let cutoff = self.layout.expect_mode(mode)?;
        let factors: Vec<Complex64> = (0..cutoff)
            .map(|n| Complex64::from_polar(1.0, phi * n as f64))
            .collect();
        let stride = self.layout.stride_of(mode);
        let mut out = self.clone();
        for (i, a) in out.amps.iter_mut().enumerate() {
            *a *= factors[(i / stride) % cutoff];
        }
        Ok(out)
    }

    /// Applies a d×d unitary (row-major) to one subsystem in place of the
    /// identity elsewhere. The caller is responsible for `u` being unitary;
    /// the norm invariant is what catches mistakes downstream.
    pub fn apply_subsystem_unitary(
        &self,
        index: usize,
        u: &[Complex64],
    ) -> Result<Self, SimError> {
        let d = self.layout.spec(index)?.dim();
        if u.len() != d * d {
            return Err(SimError::AmplitudeLength {
                got: u.len(),
                expected: d * d,
            });
        }
        let stride = self.layout.stride_of(index);
        let mut out = self.clone();
        let mut frame = vec![Complex64::ZERO; d];
        let block = d * stride;
        for base in frame_bases(self.amps.len(), block, stride) {
            for (k, f) in frame.iter_mut().enumerate() {
                *f = self.amps[base + k * stride];
            }
            for r in 0..d {
                let mut acc = Complex64::ZERO;
                for (c, f) in frame.iter().enumerate() {
                    acc += u[r * d + c] * f;
                }
                out.amps[base + r * stride] = acc;
            }
        }
        Ok(out)
    }

    /// Marginal probability distribution of one subsystem.
    pub fn subsystem_distribution(&self, index: usize) -> Result<Vec<f64>, SimError> {
        let d = self.layout.spec(index)?.dim();
        let stride = self.layout.stride_of(index);
        let mut dist = vec![0.0; d];
        for (i, a) in self.amps.iter().enumerate() {
            dist[(i / stride) % d] += a.norm_sqr();
        }
        Ok(dist)
    }

    /// Joint marginal of two subsystems, row-major over (level_i, level_j).
    pub fn pair_distribution(&self, i: usize, j: usize) -> Result<Vec<f64>, SimError> {
        let di = self.layout.spec(i)?.dim();
        let dj = self.layout.spec(j)?.dim();
        if i == j {
            return Err(SimError::SubsystemOutOfRange {
                index: j,
                count: self.layout.subsystem_count(),
            });
        }
        let si = self.layout.stride_of(i);
        let sj = self.layout.stride_of(j);
        let mut dist = vec![0.0; di * dj];
        for (idx, a) in self.amps.iter().enumerate() {
            let ci = (idx / si) % di;
            let cj = (idx / sj) % dj;
            dist[ci * dj + cj] += a.norm_sqr();
        }
        Ok(dist)
    }

    /// Total population strictly above `level` on one subsystem.
    pub fn population_above(&self, index: usize, level: usize) -> Result<f64, SimError> {
        let dist = self.subsystem_distribution(index)?;
        Ok(dist.iter().skip(level + 1).sum())
    }

    /// Mean basis level of one subsystem (photon number for modes).
    pub fn expected_occupation(&self, index: usize) -> Result<f64, SimError> {
        let dist = self.subsystem_distribution(index)?;
        Ok(dist.iter().enumerate().map(|(k, p)| k as f64 * p).sum())
    }

    /// Reduced density matrix of one subsystem, d×d row-major.
    pub fn reduced_density_matrix(&self, index: usize) -> Result<Vec<Complex64>, SimError> {
        let d = self.layout.spec(index)?.dim();
        let stride = self.layout.stride_of(index);
        let block = d * stride;
        let mut rho = vec![Complex64::ZERO; d * d];
        for base in frame_bases(self.amps.len(), block, stride) {
            for r in 0..d {
                let ar = self.amps[base + r * stride];
                if ar == Complex64::ZERO {
                    continue;
                }
                for c in 0..d {
                    rho[r * d + c] += ar * self.amps[base + c * stride].conj();
                }
            }
        }
        Ok(rho)
    }

    /// Projects one subsystem onto a basis level, keeping it in the layout.
    /// Returns the renormalized branch and its weight.
    pub fn project_subsystem_level(
        &self,
        index: usize,
        level: usize,
    ) -> Result<(Self, f64), SimError> {
        let d = self.layout.spec(index)?.dim();
        if level >= d {
            return Err(SimError::ComponentOutOfRange {
                index,
                component: level,
                dim: d,
            });
        }
        let stride = self.layout.stride_of(index);
        let mut out = self.clone();
        let mut weight = 0.0;
        for (i, a) in out.amps.iter_mut().enumerate() {
            if (i / stride) % d == level {
                weight += a.norm_sqr();
            } else {
                *a = Complex64::ZERO;
            }
        }
        let renorm = out.renormalized()?;
        Ok((renorm, weight))
    }

    /// Contracts one subsystem against a local state: `<local| ⊗ I |self>`.
    /// The subsystem leaves the layout; the remainder is renormalized and the
    /// branch weight (the squared norm of the unnormalized remainder) is
    /// returned.
    pub fn project_out_local(
        &self,
        index: usize,
        local: &[Complex64],
    ) -> Result<(Self, f64), SimError> {
        let d = self.layout.spec(index)?.dim();
        if local.len() != d {
            return Err(SimError::AmplitudeLength {
                got: local.len(),
                expected: d,
            });
        }
        let stride = self.layout.stride_of(index);
        let reduced_layout = self.layout.removed(index)?;
        let mut out = vec![Complex64::ZERO; reduced_layout.total_dim()];
        let block = d * stride;
        for (i, a) in self.amps.iter().enumerate() {
            let k = (i / stride) % d;
            let rest = (i / block) * stride + i % stride;
            out[rest] += local[k].conj() * a;
        }
        let weight: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        let remainder = Self {
            layout: reduced_layout,
            amps: out,
        }
        .renormalized()?;
        Ok((remainder, weight))
    }

    /// Contracts two subsystems against a joint local state (row-major over
    /// (level_i, level_j)); both leave the layout.
    pub fn project_out_pair(
        &self,
        i: usize,
        j: usize,
        local: &[Complex64],
    ) -> Result<(Self, f64), SimError> {
        let di = self.layout.spec(i)?.dim();
        let dj = self.layout.spec(j)?.dim();
        if i == j {
            return Err(SimError::SubsystemOutOfRange {
                index: j,
                count: self.layout.subsystem_count(),
            });
        }
        if local.len() != di * dj {
            return Err(SimError::AmplitudeLength {
                got: local.len(),
                expected: di * dj,
            });
        }
        let (first, second) = if i < j { (i, j) } else { (j, i) };
        let reduced_layout = self.layout.removed(second)?.removed(first)?;
        let si = self.layout.stride_of(i);
        let sj = self.layout.stride_of(j);
        let mut out = vec![Complex64::ZERO; reduced_layout.total_dim()];
        let n_subs = self.layout.subsystem_count();
        let mut comps = vec![0usize; n_subs];
        let mut rest = Vec::with_capacity(n_subs - 2);
        for (idx, a) in self.amps.iter().enumerate() {
            let ci = (idx / si) % di;
            let cj = (idx / sj) % dj;
            for (s, c) in comps.iter_mut().enumerate() {
                *c = self.layout.component(idx, s);
            }
            rest.clear();
            rest.extend(
                comps
                    .iter()
                    .enumerate()
                    .filter(|(s, _)| *s != i && *s != j)
                    .map(|(_, &c)| c),
            );
            let rest_idx = reduced_layout.basis_index(&rest)?;
            out[rest_idx] += local[ci * dj + cj].conj() * a;
        }
        let weight: f64 = out.iter().map(|a| a.norm_sqr()).sum();
        let remainder = Self {
            layout: reduced_layout,
            amps: out,
        }
        .renormalized()?;
        Ok((remainder, weight))
    }

    /// Drops a subsystem that sits in a definite basis level (marginal weight
    /// within [`DEFINITE_TOL`] of 1). Returns the remainder and that level.
    pub fn remove_subsystem(&self, index: usize) -> Result<(Self, usize), SimError> {
        let dist = self.subsystem_distribution(index)?;
        let (level, &weight) = dist
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("subsystem dimension is at least 1");
        if (weight - 1.0).abs() > DEFINITE_TOL {
            return Err(SimError::NotDefinite {
                index,
                level,
                weight,
            });
        }
        let d = dist.len();
        let mut local = vec![Complex64::ZERO; d];
        local[level] = Complex64::ONE;
        let (remainder, _) = self.project_out_local(index, &local)?;
        Ok((remainder, level))
    }

    /// Samples a basis-level measurement of one subsystem. Branches below
    /// [`MEASUREMENT_FLOOR`] are never selected; if every branch is below the
    /// floor the state is numerically degenerate and an error is returned.
    /// The collapsed state keeps the measured subsystem in the layout.
    pub fn measure_subsystem<R: Rng + ?Sized>(
        &self,
        index: usize,
        rng: &mut R,
    ) -> Result<MeasurementOutcome, SimError> {
        let level = self.sample_level(index, rng)?;
        let dist = self.subsystem_distribution(index)?;
        let (state, _) = self.project_subsystem_level(index, level)?;
        Ok(MeasurementOutcome {
            level,
            probability: dist[level],
            state,
        })
    }

    /// Measures one subsystem and drops it from the layout.
    pub fn measure_out_subsystem<R: Rng + ?Sized>(
        &self,
        index: usize,
        rng: &mut R,
    ) -> Result<(usize, f64, Self), SimError> {
        let level = self.sample_level(index, rng)?;
        let dist = self.subsystem_distribution(index)?;
        let d = dist.len();
        let mut local = vec![Complex64::ZERO; d];
        local[level] = Complex64::ONE;
        let (remainder, _) = self.project_out_local(index, &local)?;
        Ok((level, dist[level], remainder))
    }

    fn sample_level<R: Rng + ?Sized>(
        &self,
        index: usize,
        rng: &mut R,
    ) -> Result<usize, SimError> {
        let dist = self.subsystem_distribution(index)?;
        let eligible: f64 = dist.iter().filter(|&&p| p >= MEASUREMENT_FLOOR).sum();
        if eligible <= 0.0 {
            return Err(SimError::DegenerateMeasurement {
                floor: MEASUREMENT_FLOOR,
            });
        }
        let draw: f64 = rng.random::<f64>() * eligible;
        let mut acc = 0.0;
        let mut chosen = None;
        for (k, &p) in dist.iter().enumerate() {
            if p < MEASUREMENT_FLOOR {
                continue;
            }
            acc += p;
            chosen = Some(k);
            if draw < acc {
                break;
            }
        }
        Ok(chosen.expect("at least one branch is above the floor"))
    }
}

/// Result of a projective measurement that keeps the subsystem in place.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub level: usize,
    pub probability: f64,
    pub state: StateVector,
}

/// Iterator over frame base indices for block operations on one subsystem:
/// all flat indices whose component along that subsystem is zero.
fn frame_bases(dim: usize, block: usize, stride: usize) -> impl Iterator<Item = usize> {
    (0..dim / block).flat_map(move |high| (0..stride).map(move |low| high * block + low))
}

/// Basis state with the given component on every subsystem.
pub fn make_basis_state(
    layout: HilbertLayout,
    components: &[usize],
) -> Result<StateVector, SimError> {
    let idx = layout.basis_index(components)?;
    let mut amps = vec![Complex64::ZERO; layout.total_dim()];
    amps[idx] = Complex64::ONE;
    Ok(StateVector::from_parts(layout, amps))
}

/// All-subsystems-lowest state: vacuum on modes, ground on atoms.
pub fn make_vacuum(layout: HilbertLayout) -> Result<StateVector, SimError> {
    let comps = vec![0usize; layout.subsystem_count()];
    make_basis_state(layout, &comps)
}

/// Single ground-state atom.
pub fn make_atom_ground() -> StateVector {
    let layout = HilbertLayout::new(vec![SubsystemSpec::Atom]).expect("tiny layout");
    StateVector::from_parts(layout, vec![Complex64::ONE, Complex64::ZERO])
}

/// Truncated coherent state with its truncation bookkeeping.
#[derive(Clone, Debug)]
pub struct CoherentPrep {
    pub state: StateVector,
    /// 1 minus the squared norm of the raw truncated expansion: the Poisson
    /// weight lost above the cutoff.
    pub truncation_deficit: f64,
}

impl CoherentPrep {
    /// True when the cutoff visibly clips the photon-number distribution.
    pub fn under_resolved(&self) -> bool {
        self.truncation_deficit > COHERENT_DEFICIT_WARN
    }
}

/// Coherent state |alpha> on a single mode truncated at `cutoff`, then
/// renormalized. The returned deficit tells how much Poisson weight the
/// cutoff discarded.
pub fn make_coherent(alpha: Complex64, cutoff: usize) -> Result<CoherentPrep, SimError> {
    if cutoff == 0 {
        return Err(SimError::CutoffTooSmall {
            cutoff: 0,
            required: 1,
        });
    }
    let layout = HilbertLayout::new(vec![SubsystemSpec::FockMode { cutoff }])?;
    let mut amps = Vec::with_capacity(cutoff);
    // c_0 = e^{-|alpha|²/2}, c_{n+1} = c_n · alpha / sqrt(n+1).
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    let mut kept = 0.0;
    for n in 0..cutoff {
        amps.push(c);
        kept += c.norm_sqr();
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    let deficit = (1.0 - kept).max(0.0);
    let state = StateVector::from_parts(layout, amps).renormalized()?;
    Ok(CoherentPrep {
        state,
        truncation_deficit: deficit,
    })
}

/// Photon-number cutoff adequate for coherent amplitudes up to |alpha|:
/// mean plus ten standard deviations plus headroom.
pub fn recommended_coherent_cutoff(alpha: Complex64) -> usize {
    let a = alpha.norm();
    (a * a + 10.0 * a + 10.0).ceil() as usize
}

/// Logical qubit placed on one rail: a|0> + b|1> in photon number.
pub fn make_qubit_state(
    qubit: &SingleRailQubit,
    cutoff: usize,
) -> Result<StateVector, SimError> {
    if cutoff < 2 {
        return Err(SimError::CutoffTooSmall {
            cutoff,
            required: 2,
        });
    }
    let layout = HilbertLayout::new(vec![SubsystemSpec::FockMode { cutoff }])?;
    let mut amps = vec![Complex64::ZERO; cutoff];
    amps[0] = qubit.a();
    amps[1] = qubit.b();
    Ok(StateVector::from_parts(layout, amps))
}

/// Two-rail Bell state in photon-number encoding.
pub fn make_bell(kind: BellKind, cutoff: usize) -> Result<StateVector, SimError> {
    if cutoff < 2 {
        return Err(SimError::CutoffTooSmall {
            cutoff,
            required: 2,
        });
    }
    let layout = HilbertLayout::new(vec![
        SubsystemSpec::FockMode { cutoff },
        SubsystemSpec::FockMode { cutoff },
    ])?;
    let mut amps = vec![Complex64::ZERO; cutoff * cutoff];
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let (first, second, sign) = match kind {
        BellKind::PsiPlus => ([0, 1], [1, 0], 1.0),
        BellKind::PsiMinus => ([0, 1], [1, 0], -1.0),
        BellKind::PhiPlus => ([0, 0], [1, 1], 1.0),
        BellKind::PhiMinus => ([0, 0], [1, 1], -1.0),
    };
    amps[layout.basis_index(&first)?] = r;
    amps[layout.basis_index(&second)?] = r * sign;
    Ok(StateVector::from_parts(layout, amps))
}
