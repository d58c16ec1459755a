//! End-to-end teleportation of one rail qubit.
//!
//! Alice holds the input rail and one half of a two-rail resource pair; Bob
//! holds the other half. Expanding the tripartite state in the Bell basis of
//! Alice's two modes gives four components of equal quarter weight, each
//! tagging Bob's rail with a different invertible one-qubit transform of the
//! input. The analyzer collapses Alice's side, the classical outcome selects
//! Bob's correction, and the corrected rail is scored against the input.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{analyze, BellOutcome};
use crate::config::SimConfig;
use crate::error::SimError;
use crate::fock::{
    make_atom_ground, make_bell, make_qubit_state, BellKind, SingleRailQubit, StateVector,
};
use crate::jc::{pi_pulse, transfer_atom_to_photon, transfer_photon_to_atom, PulseParams};

/// Fock cutoff for protocol rails: vacuum and the single photon.
pub const RAIL_CUTOFF: usize = 2;

/// Phase delay applied to the rail before the flip's swap chain. The two
/// swap phases contribute (-i)·(i) and the π pulse a further -i per photon;
/// together with this delay the ideal composite is a plain amplitude
/// exchange (a, b) -> (b, a) with +1 phases.
pub const FLIP_COMPENSATION_PHASE: f64 = PI;

/// Everything one teleportation trial produced.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TeleportRecord {
    pub input: SingleRailQubit,
    pub outcome: BellOutcome,
    /// Bob's rail right after the analyzer collapse, before any correction.
    pub bob_pre: StateVector,
    /// Bob's rail after the outcome-selected correction.
    pub bob_post: StateVector,
    /// |<input|bob_post>|².
    pub fidelity: f64,
}

/// One campaign line; the CSV row shape.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: u64,
    pub outcome: BellKind,
    pub fidelity: f64,
}

/// Aggregate of one campaign. Fields are plain so two runs with the same
/// seed compare bit for bit after serialization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub trials: u64,
    pub seed: u64,
    pub ideal_mode: bool,
    pub alpha_sq: f64,
    pub mean_fidelity: f64,
    pub min_fidelity: f64,
    /// Outcome counts indexed like [`BellKind::ALL`].
    pub outcome_counts: [u64; 4],
    /// Mean fidelity conditioned on each outcome; null for unseen outcomes.
    pub outcome_mean_fidelity: [Option<f64>; 4],
    /// Trials whose fidelity fell below the configured per-trial floor.
    pub below_trial_floor: u64,
    /// Whether every configured tolerance held.
    pub thresholds_met: bool,
}

/// |ξ> on the first rail, the odd resource pair on the other two: Alice owns
/// the first two modes, Bob the last. Expands to
/// (a|001> + a|010> + b|101> + b|110>)/√2.
pub fn prepare_tripartite(q: &SingleRailQubit) -> Result<StateVector, SimError> {
    let input = make_qubit_state(q, RAIL_CUTOFF)?;
    let resource = make_bell(BellKind::PsiPlus, RAIL_CUTOFF)?;
    input.tensor(&resource)
}

/// Photon-number flip on one rail: phase delay, swap into a fresh atom,
/// π pulse, swap back, drop the atom. With an ideal pulse the composite is
/// exactly (a, b) -> (b, a); a physical pulse adds only the drive's
/// finite-amplitude error.
pub fn flip_rail<R: Rng + ?Sized>(
    s: &StateVector,
    mode: usize,
    pulse: &PulseParams,
    rng: &mut R,
) -> Result<StateVector, SimError> {
    let shifted = s.apply_phase_shift(mode, FLIP_COMPENSATION_PHASE)?;
    let atom = shifted.layout().subsystem_count();
    let staged = shifted.tensor(&make_atom_ground())?;
    let swapped = transfer_photon_to_atom(&staged, atom, mode, pulse.gamma)?;
    let (pulsed, _) = pi_pulse(&swapped, atom, pulse)?.collapse_pulse_mode(rng)?;
    let back = transfer_atom_to_photon(&pulsed, atom, mode, pulse.gamma)?;
    // The reverse swap empties the atom exactly; any pulse error lives in the
    // rail amplitudes.
    let (rest, _) = back.remove_subsystem(atom)?;
    Ok(rest)
}

/// Bob's local correction for one announced outcome, acting on his single
/// rail (mode 0 of `bob`):
///
/// * ψ+ tags the rail with (a, b) already, so nothing is done;
/// * ψ- tags it with (a, -b), undone by a π phase delay;
/// * φ+ tags it with (b, a), undone by the flip;
/// * φ- tags it with (-b, a); delay-then-flip returns -(a, b), the input up
///   to a global sign, which no measurement can see.
pub fn bob_correct<R: Rng + ?Sized>(
    bob: &StateVector,
    kind: BellKind,
    pulse: &PulseParams,
    rng: &mut R,
) -> Result<StateVector, SimError> {
    match kind {
        BellKind::PsiPlus => Ok(bob.clone()),
        BellKind::PsiMinus => bob.apply_phase_shift(0, PI),
        BellKind::PhiPlus => flip_rail(bob, 0, pulse, rng),
        BellKind::PhiMinus => flip_rail(&bob.apply_phase_shift(0, PI)?, 0, pulse, rng),
    }
}

/// One full protocol run: prepare, analyze Alice's modes, extract Bob's
/// collapsed rail, correct it, and score it against the input.
pub fn teleport_once<R: Rng + ?Sized>(
    q: &SingleRailQubit,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<TeleportRecord, SimError> {
    cfg.validate()?;
    let tripartite = prepare_tripartite(q)?;
    let probe = cfg.probe_params();
    let pulse = cfg.pulse_params();
    let (outcome, _signal, post) = analyze(&tripartite, 0, 1, &probe, &pulse, rng)?;
    // Alice's modes are definite after the analyzer, so they peel off.
    let (rest, _) = post.remove_subsystem(1)?;
    let (bob_pre, _) = rest.remove_subsystem(0)?;
    let bob_post = bob_correct(&bob_pre, outcome.kind, &pulse, rng)?;
    let target = make_qubit_state(q, RAIL_CUTOFF)?;
    let fidelity = bob_post.fidelity_to(&target)?;
    Ok(TeleportRecord {
        input: q.clone(),
        outcome,
        bob_pre,
        bob_post,
        fidelity,
    })
}

/// Independent random stream for one trial, derived from the master seed.
/// Any trial can be replayed (or run in parallel) without touching the
/// others.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial + 1);
    rng
}

/// Runs `cfg.trials` independent trials with inputs drawn from
/// `cfg.sampler`, and aggregates. The master seed alone fixes every draw, so
/// equal configs produce identical summaries and rows.
pub fn teleport_campaign(cfg: &SimConfig) -> Result<(CampaignSummary, Vec<TrialRow>), SimError> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.trials as usize);
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut counts = [0u64; 4];
    let mut sums = [0.0f64; 4];
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, trial);
        let q = cfg.sampler.draw(&mut rng);
        let record = teleport_once(&q, cfg, &mut rng)?;
        let k = record.outcome.kind.index();
        sum += record.fidelity;
        min = min.min(record.fidelity);
        counts[k] += 1;
        sums[k] += record.fidelity;
        rows.push(TrialRow {
            trial,
            outcome: record.outcome.kind,
            fidelity: record.fidelity,
        });
    }
    let mean_fidelity = sum / cfg.trials as f64;
    let outcome_mean_fidelity =
        std::array::from_fn(|k| (counts[k] > 0).then(|| sums[k] / counts[k] as f64));
    let below_trial_floor = match cfg.trial_fidelity_floor() {
        Some(floor) => rows.iter().filter(|r| r.fidelity < floor).count() as u64,
        None => 0,
    };
    let mean_ok = cfg
        .tolerances
        .min_mean_fidelity
        .map_or(true, |m| mean_fidelity >= m);
    let summary = CampaignSummary {
        trials: cfg.trials,
        seed: cfg.seed,
        ideal_mode: cfg.ideal_mode,
        alpha_sq: cfg.alpha().norm_sqr(),
        mean_fidelity,
        min_fidelity: min,
        outcome_counts: counts,
        outcome_mean_fidelity,
        below_trial_floor,
        thresholds_met: mean_ok && below_trial_floor == 0,
    };
    Ok((summary, rows))
}
