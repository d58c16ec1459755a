//! Deterministic gate set on single-rail qubits: phase delay, Hadamard, and
//! a two-rail controlled-sign, plus the CNOT composition and audit reports.
//!
//! The Hadamard runs through the cavity: a π phase delay on the rail, a swap
//! into a fresh atom, a half drive pulse, and the reverse swap. The delay is
//! chosen so the ideal composite is the standard real Hadamard
//! (|0>, |1>) -> ((|0>+|1>)/√2, (|0>-|1>)/√2), which squares to the
//! identity. The controlled-sign swaps both rails into atoms, applies the
//! sign step as its ideal atomic map (see [`cs_gate`]), and swaps back.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::fock::{make_atom_ground, HilbertLayout, StateVector, SubsystemSpec};
use crate::jc::{
    hadamard_pulse, transfer_atom_to_photon, transfer_photon_to_atom, PulseParams, SUPPORT_TOL,
};

/// Phase delay preceding the Hadamard's swap chain. Without it the chain
/// composes to (Hadamard · sign-flip), whose square is a photon-number flip
/// rather than the identity; the delay commutes the sign away exactly.
pub const HADAMARD_COMPENSATION_PHASE: f64 = PI;

/// How a report's `max_deviation` was measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationMetric {
    /// Max entrywise |actual - ideal| after removing one global phase from
    /// the whole process matrix. Used for deterministic (ideal-mode) gates,
    /// where relative phases between columns are physical.
    GlobalPhaseFixedEntry,
    /// Max over basis inputs of 1 - |<ideal|actual>|². Used when a physical
    /// drive makes each column an independent sampled run whose overall
    /// phase carries no information.
    ColumnInfidelity,
}

/// One truth-table line: a computational basis input and the gate's output
/// amplitudes over the computational basis, phase-aligned to the ideal
/// column.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TruthRow {
    pub input: String,
    pub output: Vec<Complex64>,
}

/// Audit record for one gate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GateReport {
    pub gate: String,
    pub truth_table: Vec<TruthRow>,
    pub max_deviation: f64,
    pub metric: DeviationMetric,
    /// True when the two-rail sign step is applied as its ideal atomic map;
    /// the library carries no finite-amplitude drive model of that step.
    pub idealized_sign_step: bool,
}

fn expect_rail_qubit(s: &StateVector, mode: usize) -> Result<(), SimError> {
    let above = s.population_above(mode, 1)?;
    if above > SUPPORT_TOL {
        return Err(SimError::UnsupportedLevels {
            index: mode,
            level: 1,
            weight: above,
        });
    }
    Ok(())
}

/// Phase delay on one rail qubit: |0> fixed, |1> -> e^{iφ}|1>. Rejects
/// support above one photon, where the delay would not be the qubit phase
/// gate.
pub fn phase_gate(s: &StateVector, mode: usize, phi: f64) -> Result<StateVector, SimError> {
    expect_rail_qubit(s, mode)?;
    s.apply_phase_shift(mode, phi)
}

/// Hadamard on one rail: phase delay, swap into a fresh ground atom, half
/// drive pulse, swap back, drop the atom. Ideal composite is the standard
/// Hadamard exactly; a physical pulse adds the finite-amplitude error and
/// consumes one drive-field measurement.
pub fn hadamard_gate<R: Rng + ?Sized>(
    s: &StateVector,
    mode: usize,
    pulse: &PulseParams,
    rng: &mut R,
) -> Result<StateVector, SimError> {
    let shifted = s.apply_phase_shift(mode, HADAMARD_COMPENSATION_PHASE)?;
    let atom = shifted.layout().subsystem_count();
    let staged = shifted.tensor(&make_atom_ground())?;
    let swapped = transfer_photon_to_atom(&staged, atom, mode, pulse.gamma)?;
    let (pulsed, _) = hadamard_pulse(&swapped, atom, pulse)?.collapse_pulse_mode(rng)?;
    let back = transfer_atom_to_photon(&pulsed, atom, mode, pulse.gamma)?;
    let (rest, _) = back.remove_subsystem(atom)?;
    Ok(rest)
}

/// Controlled-sign on two rails: diag(1, 1, 1, -1) on {|00>,|01>,|10>,|11>}.
///
/// Both rails are swapped into atoms, the atomic pair picks up a sign on
/// |ee> only, and the atoms are swapped back. The swap phases cancel
/// pairwise (-i·i per excitation), so the net map needs no further
/// compensation. The |ee> sign step itself is applied as its ideal map: the
/// interaction that would realize it is not modeled at finite drive
/// amplitude, so this gate is exact in both modes by construction.
pub fn cs_gate(
    s: &StateVector,
    mode_a: usize,
    mode_b: usize,
    gamma: f64,
) -> Result<StateVector, SimError> {
    let atom_a = s.layout().subsystem_count();
    let atom_b = atom_a + 1;
    let ancilla = make_atom_ground();
    let staged = s.tensor(&ancilla)?.tensor(&ancilla)?;
    let swapped = transfer_photon_to_atom(&staged, atom_a, mode_a, gamma)?;
    let mut swapped = transfer_photon_to_atom(&swapped, atom_b, mode_b, gamma)?;
    let sa = swapped.layout().stride_of(atom_a);
    let sb = swapped.layout().stride_of(atom_b);
    for (i, amp) in swapped.amps_mut().iter_mut().enumerate() {
        if (i / sa) % 2 == 1 && (i / sb) % 2 == 1 {
            *amp = -*amp;
        }
    }
    let back = transfer_atom_to_photon(&swapped, atom_a, mode_a, gamma)?;
    let back = transfer_atom_to_photon(&back, atom_b, mode_b, gamma)?;
    let (rest, _) = back.remove_subsystem(atom_b)?;
    let (rest, _) = rest.remove_subsystem(atom_a)?;
    Ok(rest)
}

/// CNOT with `control` unchanged and `target` flipped when the control rail
/// holds a photon, composed as Hadamard(target) · CS · Hadamard(target).
pub fn cnot_gate<R: Rng + ?Sized>(
    s: &StateVector,
    control: usize,
    target: usize,
    pulse: &PulseParams,
    rng: &mut R,
) -> Result<StateVector, SimError> {
    let side = hadamard_gate(s, target, pulse, rng)?;
    let signed = cs_gate(&side, control, target, pulse.gamma)?;
    hadamard_gate(&signed, target, pulse, rng)
}

fn rail_basis(modes: usize) -> Result<Vec<StateVector>, SimError> {
    let layout = HilbertLayout::new(vec![SubsystemSpec::FockMode { cutoff: 2 }; modes])?;
    let dim = layout.total_dim();
    (0..dim)
        .map(|k| {
            let mut amps = vec![Complex64::ZERO; dim];
            amps[k] = Complex64::ONE;
            StateVector::from_amplitudes(layout.clone(), amps)
        })
        .collect()
}

fn basis_label(k: usize, modes: usize) -> String {
    let digits: String = (0..modes)
        .rev()
        .map(|bit| if k >> bit & 1 == 1 { '1' } else { '0' })
        .collect();
    format!("|{digits}>")
}

/// Assembles a report from sampled gate columns against the row-major ideal
/// matrix. Deterministic gates get matrix-global phase fixing; sampled ones
/// get per-column alignment and the infidelity metric.
fn report_from_columns(
    gate: String,
    ideal: &[Complex64],
    columns: Vec<Vec<Complex64>>,
    deterministic: bool,
    idealized_sign_step: bool,
) -> GateReport {
    let dim = columns.len();
    let modes = dim.trailing_zeros() as usize;
    let ideal_col = |k: usize| (0..dim).map(|j| ideal[j * dim + k]).collect::<Vec<_>>();

    let (max_deviation, fixed_columns) = if deterministic {
        let trace: Complex64 = (0..dim)
            .map(|k| {
                columns[k]
                    .iter()
                    .zip(ideal_col(k))
                    .map(|(a, i)| i.conj() * a)
                    .sum::<Complex64>()
            })
            .sum();
        let phase = trace / trace.norm();
        let fixed: Vec<Vec<Complex64>> = columns
            .iter()
            .map(|col| col.iter().map(|a| a * phase.conj()).collect())
            .collect();
        let dev = fixed
            .iter()
            .enumerate()
            .flat_map(|(k, col)| {
                let ic = ideal_col(k);
                col.iter()
                    .zip(ic)
                    .map(|(a, i)| (a - i).norm())
                    .collect::<Vec<_>>()
            })
            .fold(0.0f64, f64::max);
        (dev, fixed)
    } else {
        let mut dev = 0.0f64;
        let mut fixed = Vec::with_capacity(dim);
        for (k, col) in columns.iter().enumerate() {
            let overlap: Complex64 = ideal_col(k)
                .iter()
                .zip(col)
                .map(|(i, a)| i.conj() * a)
                .sum();
            dev = dev.max(1.0 - overlap.norm_sqr());
            let phase = if overlap.norm() > 1e-12 {
                overlap / overlap.norm()
            } else {
                Complex64::ONE
            };
            fixed.push(col.iter().map(|a| a * phase.conj()).collect());
        }
        (dev, fixed)
    };

    let truth_table = fixed_columns
        .into_iter()
        .enumerate()
        .map(|(k, output)| TruthRow {
            input: basis_label(k, modes),
            output,
        })
        .collect();
    GateReport {
        gate,
        truth_table,
        max_deviation,
        metric: if deterministic {
            DeviationMetric::GlobalPhaseFixedEntry
        } else {
            DeviationMetric::ColumnInfidelity
        },
        idealized_sign_step,
    }
}

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn ideal_hadamard() -> [Complex64; 4] {
    [
        Complex64::new(SQRT_HALF, 0.0),
        Complex64::new(SQRT_HALF, 0.0),
        Complex64::new(SQRT_HALF, 0.0),
        Complex64::new(-SQRT_HALF, 0.0),
    ]
}

fn ideal_cs() -> [Complex64; 16] {
    let mut m = [Complex64::ZERO; 16];
    for k in 0..4 {
        m[k * 4 + k] = if k == 3 { -Complex64::ONE } else { Complex64::ONE };
    }
    m
}

fn ideal_cnot() -> [Complex64; 16] {
    let mut m = [Complex64::ZERO; 16];
    for (row, col) in [(0, 0), (1, 1), (3, 2), (2, 3)] {
        m[row * 4 + col] = Complex64::ONE;
    }
    m
}

pub fn report_phase_gate(phi: f64) -> Result<GateReport, SimError> {
    let ideal = [
        Complex64::ONE,
        Complex64::ZERO,
        Complex64::ZERO,
        Complex64::from_polar(1.0, phi),
    ];
    let columns = rail_basis(1)?
        .iter()
        .map(|b| Ok(phase_gate(b, 0, phi)?.amplitudes().to_vec()))
        .collect::<Result<Vec<_>, SimError>>()?;
    Ok(report_from_columns(
        format!("phase(phi={phi:.6})"),
        &ideal,
        columns,
        true,
        false,
    ))
}

pub fn report_hadamard<R: Rng + ?Sized>(
    pulse: &PulseParams,
    rng: &mut R,
) -> Result<GateReport, SimError> {
    let columns = rail_basis(1)?
        .iter()
        .map(|b| Ok(hadamard_gate(b, 0, pulse, rng)?.amplitudes().to_vec()))
        .collect::<Result<Vec<_>, SimError>>()?;
    Ok(report_from_columns(
        "hadamard".into(),
        &ideal_hadamard(),
        columns,
        pulse.ideal,
        false,
    ))
}

pub fn report_cs_gate(gamma: f64) -> Result<GateReport, SimError> {
    let columns = rail_basis(2)?
        .iter()
        .map(|b| Ok(cs_gate(b, 0, 1, gamma)?.amplitudes().to_vec()))
        .collect::<Result<Vec<_>, SimError>>()?;
    Ok(report_from_columns(
        "controlled_sign".into(),
        &ideal_cs(),
        columns,
        true,
        true,
    ))
}

pub fn report_cnot<R: Rng + ?Sized>(
    pulse: &PulseParams,
    rng: &mut R,
) -> Result<GateReport, SimError> {
    let columns = rail_basis(2)?
        .iter()
        .map(|b| Ok(cnot_gate(b, 0, 1, pulse, rng)?.amplitudes().to_vec()))
        .collect::<Result<Vec<_>, SimError>>()?;
    Ok(report_from_columns(
        "cnot".into(),
        &ideal_cnot(),
        columns,
        pulse.ideal,
        true,
    ))
}

/// The audit set the CLI emits: a quarter-turn phase delay, the Hadamard,
/// the controlled-sign, and the composed CNOT.
pub fn standard_gate_reports<R: Rng + ?Sized>(
    pulse: &PulseParams,
    rng: &mut R,
) -> Result<Vec<GateReport>, SimError> {
    Ok(vec![
        report_phase_gate(PI / 2.0)?,
        report_hadamard(pulse, rng)?,
        report_cs_gate(pulse.gamma)?,
        report_cnot(pulse, rng)?,
    ])
}
