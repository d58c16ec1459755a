//! Bell-state analyzer for a pair of single-rail qubits.
//!
//! The chain has two stages. A cross-Kerr probe first sorts the pair by total
//! photon parity without absorbing either photon: a coherent probe field picks
//! up a π phase per signal photon, so odd-parity states steer it to |-α> while
//! even-parity states leave it at |+α>, and reading the probe out against
//! those two references collapses the pair into a parity branch. The odd
//! branch (ψ±, one photon total) then meets a balanced two-mode coupler whose
//! output counters fire on exactly one port per kind. The even branch (φ±,
//! zero or two photons) is swapped into two ancilla atoms, rotated by half
//! pulses, and read out in the atomic basis, where the joint excitation
//! parity separates φ+ from φ-.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::fock::{
    make_atom_ground, make_coherent, recommended_coherent_cutoff, BellKind, StateVector,
    MEASUREMENT_FLOOR,
};
use crate::jc::{hadamard_pulse, transfer_photon_to_atom, PulseParams, SUPPORT_TOL};

/// Cross-Kerr coupling between the signal rails and the probe mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KerrParams {
    /// Coupling rate of the (n_a + n_b)·n_probe interaction.
    pub kappa: f64,
    /// Interaction time.
    pub tau_m: f64,
}

impl KerrParams {
    /// Timing that turns the probe into a parity meter: each signal photon
    /// advances the probe phase by exactly π, so κ·τ_m = π.
    pub fn parity_mapping(kappa: f64) -> Self {
        Self {
            kappa,
            tau_m: PI / kappa,
        }
    }

    /// Probe phase advance per signal photon.
    pub fn phase_per_photon(&self) -> f64 {
        self.kappa * self.tau_m
    }
}

/// Full description of one parity probe: field amplitude, Kerr timing, the
/// probe mode's Fock cutoff, and how far the readout may drift from its
/// coherent reference before the run is declared broken.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeParams {
    pub alpha: Complex64,
    pub kerr: KerrParams,
    pub cutoff: usize,
    pub ambiguity_tol: f64,
}

/// Total photon parity of the signal pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Odd,
    Even,
}

impl From<BellKind> for Parity {
    fn from(kind: BellKind) -> Self {
        if kind.has_odd_photon_parity() {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// What the probe readout reported.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParitySignal {
    pub parity: Parity,
    /// Conditional overlap of the post-interaction probe with the coherent
    /// reference for the sampled branch. Unity on a well-posed run; values
    /// away from one mean the Kerr timing or the cutoff is wrong.
    pub probe_overlap: f64,
    /// Born weight of the sampled parity branch in the input state.
    pub branch_probability: f64,
    /// Squared overlap of the two truncated references, |<+α|-α>|². Sets the
    /// scale of the readout's intrinsic misidentification.
    pub reference_cross_talk: f64,
}

/// Raw detector record behind a kind assignment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum BranchRecord {
    /// Counter results on the two coupler ports (odd branch). The probability
    /// is conditioned on the parity branch already taken.
    PortClicks {
        counts_a: usize,
        counts_b: usize,
        probability: f64,
    },
    /// Ancilla excitation levels after the half pulses (even branch), same
    /// conditioning.
    AtomParity {
        atom_a: usize,
        atom_b: usize,
        probability: f64,
    },
}

/// One full analyzer verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellOutcome {
    pub kind: BellKind,
    pub parity: Parity,
    pub branch: BranchRecord,
}

fn expect_distinct(a: usize, b: usize, count: usize) -> Result<(), SimError> {
    if a == b {
        return Err(SimError::SubsystemOutOfRange { index: b, count });
    }
    Ok(())
}

/// Exact cross-Kerr propagator: each basis state picks up the phase
/// e^{-i·κ·τ·(n_a + n_b)·n_probe}. Diagonal in photon number, so every
/// photon-number distribution of the signal pair is left untouched.
pub fn kerr_propagator(
    s: &StateVector,
    a: usize,
    b: usize,
    probe: usize,
    kerr: &KerrParams,
) -> Result<StateVector, SimError> {
    let layout = s.layout();
    let ca = layout.expect_mode(a)?;
    let cb = layout.expect_mode(b)?;
    let cp = layout.expect_mode(probe)?;
    expect_distinct(a, b, layout.subsystem_count())?;
    expect_distinct(a, probe, layout.subsystem_count())?;
    expect_distinct(b, probe, layout.subsystem_count())?;
    let (sa, sb, sp) = (
        layout.stride_of(a),
        layout.stride_of(b),
        layout.stride_of(probe),
    );
    let phase = kerr.phase_per_photon();
    let mut out = s.clone();
    for (i, amp) in out.amps_mut().iter_mut().enumerate() {
        let total = (i / sa) % ca + (i / sb) % cb;
        let n_probe = (i / sp) % cp;
        let angle = phase * (total * n_probe) as f64;
        *amp *= Complex64::from_polar(1.0, -angle);
    }
    Ok(out)
}

/// Born weights of the odd and even total-photon-parity sectors of two modes.
pub fn parity_weights(s: &StateVector, a: usize, b: usize) -> Result<(f64, f64), SimError> {
    let dist = s.pair_distribution(a, b)?;
    let db = s.layout().dim_of(b);
    let mut odd = 0.0;
    let mut even = 0.0;
    for (idx, p) in dist.iter().enumerate() {
        if (idx / db + idx % db) % 2 == 1 {
            odd += p;
        } else {
            even += p;
        }
    }
    Ok((odd, even))
}

/// Projects two modes onto one total-photon-parity sector and renormalizes.
/// Returns the branch state and its Born weight.
pub fn project_photon_parity(
    s: &StateVector,
    a: usize,
    b: usize,
    parity: Parity,
) -> Result<(StateVector, f64), SimError> {
    let layout = s.layout();
    let ca = layout.expect_mode(a)?;
    let cb = layout.expect_mode(b)?;
    expect_distinct(a, b, layout.subsystem_count())?;
    let (sa, sb) = (layout.stride_of(a), layout.stride_of(b));
    let keep_odd = parity == Parity::Odd;
    let mut out = s.clone();
    for (i, amp) in out.amps_mut().iter_mut().enumerate() {
        let total = (i / sa) % ca + (i / sb) % cb;
        if (total % 2 == 1) != keep_odd {
            *amp = Complex64::ZERO;
        }
    }
    let weight = out.norm_sqr();
    Ok((out.renormalized()?, weight))
}

/// Quantum-nondemolition parity readout of two signal modes.
///
/// A coherent probe is appended, entangled with the signal through the
/// cross-Kerr propagator, and read out against the |±α> references: with the
/// parity-mapping timing the probe ends in |-α> on the odd sector and |+α> on
/// the even sector, exactly, because the truncated-and-renormalized coherent
/// expansions of ±α differ only by signs. The readout samples a parity branch
/// with the exact Born weights, projects the probe onto the matching
/// reference, and returns the signal with the probe factored out.
///
/// The reported overlap is conditional (branch weight after projection over
/// the exact sector weight), so it sits at one for any amplitude; it degrades
/// only when the Kerr timing or the cutoff is wrong, and past `ambiguity_tol`
/// the readout refuses to classify.
///
/// The non-orthogonality of the references leaves opposite-parity weight of
/// order |<+α|-α>|² = e^{-4|α|²} in the returned branch. Below |α|² ≈ 8 that
/// residue rises above the 1e-12 support tolerances of the downstream
/// elements, which will then reject; at the default amplitude it is far
/// below every tolerance in the chain.
pub fn qnd_parity_probe<R: Rng + ?Sized>(
    s: &StateVector,
    a: usize,
    b: usize,
    probe: &ProbeParams,
    rng: &mut R,
) -> Result<(StateVector, ParitySignal), SimError> {
    let required = recommended_coherent_cutoff(probe.alpha);
    if probe.cutoff < required {
        return Err(SimError::CutoffTooSmall {
            cutoff: probe.cutoff,
            required,
        });
    }
    let (w_odd, w_even) = parity_weights(s, a, b)?;

    let plus = make_coherent(probe.alpha, probe.cutoff)?;
    let minus = make_coherent(-probe.alpha, probe.cutoff)?;
    let cross_amp: Complex64 = plus
        .state
        .amplitudes()
        .iter()
        .zip(minus.state.amplitudes())
        .map(|(p, m)| p.conj() * m)
        .sum();
    let reference_cross_talk = cross_amp.norm_sqr();

    let joint = s.tensor(&plus.state)?;
    let probe_idx = joint.layout().subsystem_count() - 1;
    let evolved = kerr_propagator(&joint, a, b, probe_idx, &probe.kerr)?;

    let odd_eligible = w_odd >= MEASUREMENT_FLOOR;
    let even_eligible = w_even >= MEASUREMENT_FLOOR;
    let pick_odd = match (odd_eligible, even_eligible) {
        (true, false) => true,
        (false, true) => false,
        (true, true) => rng.random::<f64>() * (w_odd + w_even) < w_odd,
        (false, false) => {
            return Err(SimError::DegenerateMeasurement {
                floor: MEASUREMENT_FLOOR,
            })
        }
    };
    let (parity, reference, branch_probability) = if pick_odd {
        (Parity::Odd, &minus.state, w_odd)
    } else {
        (Parity::Even, &plus.state, w_even)
    };

    let (signal, projected_weight) = evolved.project_out_local(probe_idx, reference.amplitudes())?;
    let probe_overlap = projected_weight / branch_probability;
    // Both directions of drift are failures: a low ratio means the probe
    // missed its reference, a high one means the opposite-parity component
    // leaked through the readout.
    if (probe_overlap - 1.0).abs() > probe.ambiguity_tol {
        return Err(SimError::AmbiguousParity {
            overlap: probe_overlap,
            threshold: 1.0 - probe.ambiguity_tol,
        });
    }
    Ok((
        signal,
        ParitySignal {
            parity,
            probe_overlap,
            branch_probability,
            reference_cross_talk,
        },
    ))
}

/// Balanced two-mode coupler on the single-photon subspace:
/// |10> -> (|10> + |01>)/√2 and |01> -> (|10> - |01>)/√2, vacuum fixed.
/// Self-inverse, so applying it twice restores the input exactly. Support on
/// two or more total photons is outside this element's domain and is
/// rejected; residual multi-photon weight below tolerance rides through
/// unchanged.
pub fn beam_splitter(s: &StateVector, a: usize, b: usize) -> Result<StateVector, SimError> {
    let layout = s.layout();
    let ca = layout.expect_mode(a)?;
    let cb = layout.expect_mode(b)?;
    expect_distinct(a, b, layout.subsystem_count())?;
    if ca != cb {
        return Err(SimError::UnequalCutoffs { a: ca, b: cb });
    }
    let dist = s.pair_distribution(a, b)?;
    let mut sector_weight = vec![0.0; 2 * ca - 1];
    for (idx, p) in dist.iter().enumerate() {
        sector_weight[idx / cb + idx % cb] += p;
    }
    for (sector, &weight) in sector_weight.iter().enumerate().skip(2) {
        if weight > SUPPORT_TOL {
            return Err(SimError::UnsupportedSector { sector, weight });
        }
    }
    let (sa, sb) = (layout.stride_of(a), layout.stride_of(b));
    let mut out = s.clone();
    let amps = out.amps_mut();
    for i in 0..amps.len() {
        if (i / sa) % ca == 1 && (i / sb) % cb == 0 {
            let j = i - sa + sb;
            let (one_a, one_b) = (amps[i], amps[j]);
            amps[i] = (one_a + one_b) * FRAC_1_SQRT_2;
            amps[j] = (one_a - one_b) * FRAC_1_SQRT_2;
        }
    }
    Ok(out)
}

/// Second analyzer stage for the odd branch: coupler, then a photon counter
/// on each port. A click on port `a` alone means ψ+, on port `b` alone ψ-.
/// Any other pattern cannot come from the odd sector and is reported as a
/// broken upstream stage. The returned state keeps the full layout with both
/// modes collapsed onto the recorded counts.
pub fn discriminate_psi<R: Rng + ?Sized>(
    s: &StateVector,
    a: usize,
    b: usize,
    rng: &mut R,
) -> Result<(BellOutcome, StateVector), SimError> {
    let mixed = beam_splitter(s, a, b)?;
    let port_a = mixed.measure_subsystem(a, rng)?;
    let port_b = port_a.state.measure_subsystem(b, rng)?;
    let (counts_a, counts_b) = (port_a.level, port_b.level);
    let kind = match (counts_a, counts_b) {
        (1, 0) => BellKind::PsiPlus,
        (0, 1) => BellKind::PsiMinus,
        _ => {
            return Err(SimError::InvalidClickPattern {
                n_a: counts_a,
                n_b: counts_b,
            })
        }
    };
    let outcome = BellOutcome {
        kind,
        parity: Parity::Odd,
        branch: BranchRecord::PortClicks {
            counts_a,
            counts_b,
            probability: port_a.probability * port_b.probability,
        },
    };
    Ok((outcome, port_b.state))
}

/// Second analyzer stage for the even branch: both rails are swapped into
/// fresh ancilla atoms, each atom gets a half pulse, and both are read out.
///
/// The two swaps map (|00> ± |11>)/√2 onto (|gg> ∓ |ee>)/√2; the sign flip on
/// the two-photon component is the product of the two -i swap phases and
/// needs no further compensation. The half pulses leave |gg> - |ee| parity
/// even and send |gg> + |ee> onto the odd-parity pair (|ge> + |eg>), so joint
/// atomic excitation parity even means φ+ and odd means φ-. The ancillas are
/// measured and removed; the rails come back in vacuum.
pub fn discriminate_phi<R: Rng + ?Sized>(
    s: &StateVector,
    a: usize,
    b: usize,
    pulse: &PulseParams,
    rng: &mut R,
) -> Result<(BellOutcome, StateVector), SimError> {
    let atom_a = s.layout().subsystem_count();
    let atom_b = atom_a + 1;
    let ancilla = make_atom_ground();
    let staged = s.tensor(&ancilla)?.tensor(&ancilla)?;
    let swapped = transfer_photon_to_atom(&staged, atom_a, a, pulse.gamma)?;
    let swapped = transfer_photon_to_atom(&swapped, atom_b, b, pulse.gamma)?;
    let (rotated, _) = hadamard_pulse(&swapped, atom_a, pulse)?.collapse_pulse_mode(rng)?;
    let (rotated, _) = hadamard_pulse(&rotated, atom_b, pulse)?.collapse_pulse_mode(rng)?;
    let read_a = rotated.measure_subsystem(atom_a, rng)?;
    let read_b = read_a.state.measure_subsystem(atom_b, rng)?;
    let kind = if (read_a.level + read_b.level) % 2 == 0 {
        BellKind::PhiPlus
    } else {
        BellKind::PhiMinus
    };
    let (rest, _) = read_b.state.remove_subsystem(atom_b)?;
    let (rest, _) = rest.remove_subsystem(atom_a)?;
    let outcome = BellOutcome {
        kind,
        parity: Parity::Even,
        branch: BranchRecord::AtomParity {
            atom_a: read_a.level,
            atom_b: read_b.level,
            probability: read_a.probability * read_b.probability,
        },
    };
    Ok((outcome, rest))
}

/// Full analyzer: parity probe, then the branch-appropriate second stage.
/// Works on any state that carries the two rails; other subsystems ride along
/// untouched, which is what teleportation needs. Returns the verdict, the
/// probe's readout record, and the post-measurement state with both rails
/// collapsed.
pub fn analyze<R: Rng + ?Sized>(
    s: &StateVector,
    a: usize,
    b: usize,
    probe: &ProbeParams,
    pulse: &PulseParams,
    rng: &mut R,
) -> Result<(BellOutcome, ParitySignal, StateVector), SimError> {
    let (sorted, signal) = qnd_parity_probe(s, a, b, probe, rng)?;
    let (outcome, post) = match signal.parity {
        Parity::Odd => discriminate_psi(&sorted, a, b, rng)?,
        Parity::Even => discriminate_phi(&sorted, a, b, pulse, rng)?,
    };
    Ok((outcome, signal, post))
}

/// Exact outcome distribution of [`analyze`] over the four kinds, indexed by
/// [`BellKind::index`]. No sampling: the parity weights come from the Born
/// rule directly, the odd branch from the coupler's port distribution, and
/// the even branch from the atomic parity distribution with any drive fields
/// kept in the state and traced over. With ideal pulses this reproduces the
/// projective Bell-basis rule |<Bell_k|s>|².
pub fn kind_probabilities(
    s: &StateVector,
    a: usize,
    b: usize,
    pulse: &PulseParams,
) -> Result<[f64; 4], SimError> {
    let (w_odd, w_even) = parity_weights(s, a, b)?;
    let mut probs = [0.0; 4];

    if w_odd > MEASUREMENT_FLOOR {
        let (odd_state, _) = project_photon_parity(s, a, b, Parity::Odd)?;
        let mixed = beam_splitter(&odd_state, a, b)?;
        let dist = mixed.pair_distribution(a, b)?;
        let db = mixed.layout().dim_of(b);
        probs[BellKind::PsiPlus.index()] = w_odd * dist[db];
        probs[BellKind::PsiMinus.index()] = w_odd * dist[1];
    }

    if w_even > MEASUREMENT_FLOOR {
        let (even_state, _) = project_photon_parity(s, a, b, Parity::Even)?;
        let atom_a = even_state.layout().subsystem_count();
        let atom_b = atom_a + 1;
        let ancilla = make_atom_ground();
        let staged = even_state.tensor(&ancilla)?.tensor(&ancilla)?;
        let swapped = transfer_photon_to_atom(&staged, atom_a, a, pulse.gamma)?;
        let swapped = transfer_photon_to_atom(&swapped, atom_b, b, pulse.gamma)?;
        let rotated = hadamard_pulse(&swapped, atom_a, pulse)?.state;
        let rotated = hadamard_pulse(&rotated, atom_b, pulse)?.state;
        let dist = rotated.pair_distribution(atom_a, atom_b)?;
        probs[BellKind::PhiPlus.index()] = w_even * (dist[0] + dist[3]);
        probs[BellKind::PhiMinus.index()] = w_even * (dist[1] + dist[2]);
    }
    Ok(probs)
}
