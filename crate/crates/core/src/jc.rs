//! Resonant atom-cavity exchange: the closed-form evolution, the
//! photon-to-atom state transfers built on it, and the coherent-field pulses
//! that drive atomic rotations.
//!
//! The exchange Hamiltonian H = γ(σ⁻a† + σ⁺a) couples the basis pairs
//! (|g,n>, |e,n-1>) and leaves |g,0> alone, so its propagator is a direct
//! sum of 2×2 rotations with mixing angle γt√n:
//!
//! ```text
//! |g,n>   ->  cos(γt√n)   |g,n>   - i sin(γt√n)   |e,n-1>
//! |e,n-1> ->  cos(γt√n)   |e,n-1> - i sin(γt√n)   |g,n>
//! ```
//!
//! Everything in this module applies those rotations exactly; the only
//! approximation anywhere is the Fock-space cutoff, which is policed by a
//! leak check on the top rung.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::fock::{make_coherent, recommended_coherent_cutoff, StateVector};

/// Maximum population tolerated in the pair-less top level |e, cutoff-1>
/// before evolution refuses to run.
pub const LEAK_TOL: f64 = 1e-8;

/// Maximum population tolerated outside a transfer's supported levels.
pub const SUPPORT_TOL: f64 = 1e-12;

/// Tail bound at which the pulse-error series stops adding terms.
const SERIES_TERM_FLOOR: f64 = 1e-16;

/// Coupling strength and interaction time for one exchange window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JCParams {
    pub gamma: f64,
    pub duration: f64,
}

impl JCParams {
    pub fn new(gamma: f64, duration: f64) -> Self {
        Self { gamma, duration }
    }

    /// Half an exchange period on the one-photon pair: γt = π/2, the window
    /// that swaps a rail photon into the atom.
    pub fn transfer(gamma: f64) -> Self {
        Self {
            gamma,
            duration: std::f64::consts::FRAC_PI_2 / gamma,
        }
    }

    /// Time-reversed transfer window, which reads the atom back onto the rail.
    pub fn inverse_transfer(gamma: f64) -> Self {
        Self {
            gamma,
            duration: -std::f64::consts::FRAC_PI_2 / gamma,
        }
    }

    /// Duration of a π/2 coherent pulse: t_s = π/(4γ|alpha|).
    pub fn half_pulse(gamma: f64, alpha_abs: f64) -> Self {
        Self {
            gamma,
            duration: std::f64::consts::FRAC_PI_4 / (gamma * alpha_abs),
        }
    }

    /// Duration of a π coherent pulse: 2 t_s.
    pub fn full_pulse(gamma: f64, alpha_abs: f64) -> Self {
        Self {
            gamma,
            duration: std::f64::consts::FRAC_PI_2 / (gamma * alpha_abs),
        }
    }
}

/// Applies the exchange propagator between one atom and one mode, leaving
/// every other subsystem untouched.
///
/// Errors if the top rung |e, cutoff-1> (whose partner lies above the
/// cutoff) holds more than [`LEAK_TOL`] population.
pub fn jc_evolve(
    s: &StateVector,
    atom: usize,
    mode: usize,
    params: &JCParams,
) -> Result<StateVector, SimError> {
    let layout = s.layout();
    layout.expect_atom(atom)?;
    let cutoff = layout.expect_mode(mode)?;
    let sa = layout.stride_of(atom);
    let sm = layout.stride_of(mode);

    let angle = params.gamma * params.duration;
    let trig: Vec<(f64, f64)> = (0..cutoff)
        .map(|n| {
            let theta = angle * (n as f64).sqrt();
            (theta.cos(), theta.sin())
        })
        .collect();

    let mut out = s.clone();
    let amps = out.amps_mut();
    let mut top_leak = 0.0;
    for i in 0..amps.len() {
        let atom_level = (i / sa) % 2;
        if atom_level != 0 {
            // Visited through its ground partner; only the pair-less top rung
            // needs attention here.
            if (i / sm) % cutoff == cutoff - 1 {
                top_leak += amps[i].norm_sqr();
            }
            continue;
        }
        let n = (i / sm) % cutoff;
        if n == 0 {
            continue; // |g,0> is stationary.
        }
        let partner = i + sa - sm; // |e, n-1>
        let (c, s_) = trig[n];
        let g_amp = amps[i];
        let e_amp = amps[partner];
        let rot = Complex64::new(0.0, -s_);
        amps[i] = c * g_amp + rot * e_amp;
        amps[partner] = c * e_amp + rot * g_amp;
    }
    if top_leak > LEAK_TOL {
        return Err(SimError::TruncationLeak {
            index: mode,
            population: top_leak,
            limit: LEAK_TOL,
        });
    }
    Ok(out)
}

/// Swaps a rail qubit into an atom: a|0> + b|1> on the mode, atom in |g>,
/// becomes a|g> - i·b|e> with the mode left in vacuum.
pub fn transfer_photon_to_atom(
    s: &StateVector,
    atom: usize,
    mode: usize,
    gamma: f64,
) -> Result<StateVector, SimError> {
    s.layout().expect_atom(atom)?;
    s.layout().expect_mode(mode)?;
    let excited = s.population_above(atom, 0)?;
    if excited > SUPPORT_TOL {
        return Err(SimError::UnsupportedLevels {
            index: atom,
            level: 0,
            weight: excited,
        });
    }
    let multi_photon = s.population_above(mode, 1)?;
    if multi_photon > SUPPORT_TOL {
        return Err(SimError::UnsupportedLevels {
            index: mode,
            level: 1,
            weight: multi_photon,
        });
    }
    jc_evolve(s, atom, mode, &JCParams::transfer(gamma))
}

/// Reads an atom back onto a vacuum rail: a|g> + b|e> becomes
/// a|0> + i·b|1> with the atom left in |g>. Inverse of
/// [`transfer_photon_to_atom`] up to the two phase factors.
pub fn transfer_atom_to_photon(
    s: &StateVector,
    atom: usize,
    mode: usize,
    gamma: f64,
) -> Result<StateVector, SimError> {
    s.layout().expect_atom(atom)?;
    s.layout().expect_mode(mode)?;
    let occupied = s.population_above(mode, 0)?;
    if occupied > SUPPORT_TOL {
        return Err(SimError::UnsupportedLevels {
            index: mode,
            level: 0,
            weight: occupied,
        });
    }
    jc_evolve(s, atom, mode, &JCParams::inverse_transfer(gamma))
}

/// How a coherent drive pulse is realized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseParams {
    /// Coherent amplitude of the drive field. Only |alpha| sets the pulse
    /// timing and error; the phase rides along in the field state.
    pub alpha: Complex64,
    pub gamma: f64,
    /// Fock cutoff for the drive mode.
    pub cutoff: usize,
    /// When set, the pulse acts as its infinite-field limit: a bare atomic
    /// rotation with no drive mode appended.
    pub ideal: bool,
}

impl PulseParams {
    pub fn physical(alpha: Complex64, gamma: f64) -> Self {
        Self {
            alpha,
            gamma,
            cutoff: recommended_coherent_cutoff(alpha),
            ideal: false,
        }
    }

    pub fn ideal() -> Self {
        Self {
            alpha: Complex64::ZERO,
            gamma: 1.0,
            cutoff: 0,
            ideal: true,
        }
    }
}

/// Output of a pulse: the evolved state, plus the drive mode's position in
/// the layout when a physical field was appended.
#[derive(Clone, Debug)]
pub struct Pulsed {
    pub state: StateVector,
    pub pulse_mode: Option<usize>,
    pub truncation_deficit: f64,
}

impl Pulsed {
    /// Measures the drive mode in the photon-number basis and drops it,
    /// returning the count when a physical field was present. Averaged over
    /// outcomes this reproduces the open-system pulse exactly; sampling keeps
    /// every branch a pure state.
    pub fn collapse_pulse_mode<R: Rng + ?Sized>(
        self,
        rng: &mut R,
    ) -> Result<(StateVector, Option<usize>), SimError> {
        match self.pulse_mode {
            None => Ok((self.state, None)),
            Some(idx) => {
                let (count, _, rest) = self.state.measure_out_subsystem(idx, rng)?;
                Ok((rest, Some(count)))
            }
        }
    }
}

/// Exact π/2-rotation the half pulse approaches as |alpha| -> ∞:
/// exp(-i·(π/4)·σ_x), taking (|g> + i|e>)/√2 to |g>.
const HALF_PULSE_LIMIT: [Complex64; 4] = [
    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
    Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2),
    Complex64::new(0.0, -std::f64::consts::FRAC_1_SQRT_2),
    Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
];

/// Exact π-rotation the full pulse approaches: exp(-i·(π/2)·σ_x) = -i·σ_x.
const FULL_PULSE_LIMIT: [Complex64; 4] = [
    Complex64::new(0.0, 0.0),
    Complex64::new(0.0, -1.0),
    Complex64::new(0.0, -1.0),
    Complex64::new(0.0, 0.0),
];

fn coherent_pulse(
    s: &StateVector,
    atom: usize,
    params: &PulseParams,
    half_periods: f64,
    limit: &[Complex64; 4],
) -> Result<Pulsed, SimError> {
    s.layout().expect_atom(atom)?;
    if params.ideal {
        return Ok(Pulsed {
            state: s.apply_subsystem_unitary(atom, limit)?,
            pulse_mode: None,
            truncation_deficit: 0.0,
        });
    }
    let alpha_abs = params.alpha.norm();
    if alpha_abs <= 0.0 {
        return Err(SimError::InvalidConfig {
            reason: "physical pulse needs a nonzero drive amplitude".into(),
        });
    }
    let required = recommended_coherent_cutoff(params.alpha);
    if params.cutoff < required {
        return Err(SimError::CutoffTooSmall {
            cutoff: params.cutoff,
            required,
        });
    }
    let prep = make_coherent(params.alpha, params.cutoff)?;
    let joint = s.tensor(&prep.state)?;
    let pulse_mode = joint.layout().subsystem_count() - 1;
    let timing = JCParams::half_pulse(params.gamma, alpha_abs);
    let evolved = jc_evolve(
        &joint,
        atom,
        pulse_mode,
        &JCParams::new(params.gamma, timing.duration * half_periods),
    )?;
    Ok(Pulsed {
        state: evolved,
        pulse_mode: Some(pulse_mode),
        truncation_deficit: prep.truncation_deficit,
    })
}

/// π/2 coherent pulse on one atom (duration t_s). The |alpha| -> ∞ limit is
/// the x-axis Bloch rotation by π/4; at finite alpha the full entangled
/// atom-field state is produced with no further approximation.
pub fn hadamard_pulse(
    s: &StateVector,
    atom: usize,
    params: &PulseParams,
) -> Result<Pulsed, SimError> {
    coherent_pulse(s, atom, params, 1.0, &HALF_PULSE_LIMIT)
}

/// π coherent pulse on one atom (duration 2·t_s), the flip used by Bob's
/// photon-number corrections.
pub fn pi_pulse(s: &StateVector, atom: usize, params: &PulseParams) -> Result<Pulsed, SimError> {
    coherent_pulse(s, atom, params, 2.0, &FULL_PULSE_LIMIT)
}

/// One point of the pulse-error curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorProbabilityPoint {
    pub alpha_sq: f64,
    pub p_err: f64,
    /// Set when alpha = 0, where the formula degenerates to the flat value
    /// 1/2 rather than a finite-field correction.
    pub zero_alpha_limit: bool,
}

/// Misidentification probability of the π/2 pulse on the superposition it
/// should rotate into |e>:
///
/// ```text
/// P_err = (e^{-|α|²}/2) Σ_n (|α|^{2n}/n!) · |cos(π√n/(4|α|)) - (√n/|α|)·sin(π√n/(4|α|))|²
/// ```
///
/// The sum runs until the Poisson tail is provably below 1e-15.
pub fn perr(alpha: Complex64) -> ErrorProbabilityPoint {
    let lambda = alpha.norm_sqr();
    if lambda == 0.0 {
        return ErrorProbabilityPoint {
            alpha_sq: 0.0,
            p_err: 0.5,
            zero_alpha_limit: true,
        };
    }
    let a = alpha.norm();
    // Poisson weights by direct recurrence while e^{-λ} is representable,
    // in log space beyond that.
    let log_weights = lambda > 700.0;
    let ln_lambda = lambda.ln();
    let mut w = if log_weights { 0.0 } else { (-lambda).exp() };
    let mut ln_factorial = 0.0;
    let mut total = 0.0;
    let mut n: u64 = 0;
    loop {
        let nf = n as f64;
        let weight = if log_weights {
            (-lambda + nf * ln_lambda - ln_factorial).exp()
        } else {
            w
        };
        let root = nf.sqrt() / a;
        let theta = std::f64::consts::FRAC_PI_4 * root;
        let mag = theta.cos() - root * theta.sin();
        total += weight * mag * mag / 2.0;

        // |mag| ≤ 1 + √n/|α|, so this bounds the term; past 2λ+20 the
        // weights decay at least geometrically with ratio < 0.55.
        let term_bound = weight * (1.0 + root) * (1.0 + root) / 2.0;
        if nf >= 2.0 * lambda + 20.0 && term_bound < SERIES_TERM_FLOOR {
            break;
        }
        n += 1;
        ln_factorial += (n as f64).ln();
        if !log_weights {
            w *= lambda / n as f64;
        }
    }
    ErrorProbabilityPoint {
        alpha_sq: lambda,
        p_err: total,
        zero_alpha_limit: false,
    }
}

/// Pulse-error curve over a grid of |alpha|² values.
pub fn perr_sweep(alpha_sq_grid: &[f64]) -> Result<Vec<ErrorProbabilityPoint>, SimError> {
    let mut points = Vec::with_capacity(alpha_sq_grid.len());
    for &lambda in alpha_sq_grid {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(SimError::InvalidConfig {
                reason: format!("pulse-error grid needs positive |alpha|² values, got {lambda}"),
            });
        }
        points.push(perr(Complex64::new(lambda.sqrt(), 0.0)));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{
        make_atom_ground, make_basis_state, make_qubit_state, HilbertLayout,
        SingleRailQubit, StateVector, SubsystemSpec,
    };
    use crate::oracle::{build_jc_hamiltonian, evolve_exact};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn atom_mode_layout(cutoff: usize) -> HilbertLayout {
        HilbertLayout::new(vec![
            SubsystemSpec::Atom,
            SubsystemSpec::FockMode { cutoff },
        ])
        .unwrap()
    }

    #[test]
    fn one_photon_pair_oscillates_with_the_closed_form() {
        let layout = atom_mode_layout(4);
        let start = make_basis_state(layout, &[0, 1]).unwrap();
        let gamma = 0.9;
        let t = 0.73;
        let out = jc_evolve(&start, 0, 1, &JCParams::new(gamma, t)).unwrap();
        let theta = gamma * t;
        assert!((out.amplitude(&[0, 1]).unwrap() - c(theta.cos(), 0.0)).norm() < 1e-14);
        assert!((out.amplitude(&[1, 0]).unwrap() - c(0.0, -theta.sin())).norm() < 1e-14);
    }

    #[test]
    fn closed_form_matches_the_dense_reference() {
        // Same initial state, same Hamiltonian, two disjoint code paths.
        let cutoff = 6;
        let layout = atom_mode_layout(cutoff);
        let dim = layout.total_dim();
        let mut amps: Vec<Complex64> = (0..dim)
            .map(|k| c(((k + 1) as f64 * 0.37).sin(), (k as f64 * 0.61).cos()))
            .collect();
        // Empty the pair-less top rung so the leak check passes.
        let top = layout.basis_index(&[1, cutoff - 1]).unwrap();
        amps[top] = Complex64::ZERO;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let scale = norm.sqrt().recip();
        for a in &mut amps {
            *a *= scale;
        }
        let s = StateVector::from_amplitudes(layout.clone(), amps).unwrap();
        let gamma = 1.21;
        let t = 0.58;
        let fast = jc_evolve(&s, 0, 1, &JCParams::new(gamma, t)).unwrap();
        let h = build_jc_hamiltonian(&layout, 0, 1, gamma).unwrap();
        let slow = evolve_exact(&h, t, &s).unwrap();
        let max_dev = fast
            .amplitudes()
            .iter()
            .zip(slow.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_dev < 1e-12, "paths disagree by {max_dev:.3e}");
    }

    #[test]
    fn transfer_parks_the_rail_qubit_in_the_atom() {
        let q = SingleRailQubit::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let gamma = 2.0;
        let joint = make_qubit_state(&q, 2)
            .unwrap()
            .tensor(&make_atom_ground())
            .unwrap();
        let out = transfer_photon_to_atom(&joint, 1, 0, gamma).unwrap();
        // a|g> - i b|e>, rail in vacuum.
        assert!((out.amplitude(&[0, 0]).unwrap() - q.a()).norm() < 1e-14);
        assert!((out.amplitude(&[0, 1]).unwrap() - c(0.0, -1.0) * q.b()).norm() < 1e-14);
        assert!(out.population_above(0, 0).unwrap() < 1e-28);
    }

    #[test]
    fn transfer_round_trip_restores_the_rail_exactly() {
        let q = SingleRailQubit::new(c(0.48, -0.36), c(0.48, 0.64)).unwrap();
        let gamma = 1.4;
        let joint = make_qubit_state(&q, 2)
            .unwrap()
            .tensor(&make_atom_ground())
            .unwrap();
        let there = transfer_photon_to_atom(&joint, 1, 0, gamma).unwrap();
        let back = transfer_atom_to_photon(&there, 1, 0, gamma).unwrap();
        assert!(back.fidelity_to(&joint).unwrap() > 1.0 - 1e-14);
    }

    #[test]
    fn transfer_rejects_multi_photon_rails_and_excited_atoms() {
        let layout = HilbertLayout::new(vec![
            SubsystemSpec::FockMode { cutoff: 3 },
            SubsystemSpec::Atom,
        ])
        .unwrap();
        let two_photon = make_basis_state(layout.clone(), &[2, 0]).unwrap();
        assert!(matches!(
            transfer_photon_to_atom(&two_photon, 1, 0, 1.0),
            Err(SimError::UnsupportedLevels { index: 0, .. })
        ));
        let excited = make_basis_state(layout.clone(), &[1, 1]).unwrap();
        assert!(matches!(
            transfer_photon_to_atom(&excited, 1, 0, 1.0),
            Err(SimError::UnsupportedLevels { index: 1, .. })
        ));
        let occupied = make_basis_state(layout, &[1, 1]).unwrap();
        assert!(matches!(
            transfer_atom_to_photon(&occupied, 1, 0, 1.0),
            Err(SimError::UnsupportedLevels { index: 0, .. })
        ));
    }

    #[test]
    fn top_rung_population_trips_the_leak_check() {
        let layout = atom_mode_layout(3);
        let top = make_basis_state(layout, &[1, 2]).unwrap(); // |e, cutoff-1>
        assert!(matches!(
            jc_evolve(&top, 0, 1, &JCParams::transfer(1.0)),
            Err(SimError::TruncationLeak { .. })
        ));
    }

    #[test]
    fn ideal_half_pulse_rotates_the_marked_superposition_into_g() {
        let layout = HilbertLayout::new(vec![SubsystemSpec::Atom]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus_i = StateVector::from_amplitudes(layout, vec![c(r, 0.0), c(0.0, r)]).unwrap();
        let out = hadamard_pulse(&plus_i, 0, &PulseParams::ideal()).unwrap();
        assert!(out.pulse_mode.is_none());
        assert!((out.state.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(out.state.amplitudes()[1].norm() < 1e-15);
    }

    #[test]
    fn ideal_full_pulse_is_minus_i_sigma_x() {
        let out = pi_pulse(&make_atom_ground(), 0, &PulseParams::ideal()).unwrap();
        assert!((out.state.amplitudes()[1] - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn physical_half_pulse_misidentification_equals_the_error_series() {
        // Dual route: the full entangled atom-field simulation against the
        // closed-form Poisson series.
        let alpha = c(2.0, 0.0); // |alpha|² = 4, comfortably resolvable
        let params = PulseParams::physical(alpha, 1.0);
        let layout = HilbertLayout::new(vec![SubsystemSpec::Atom]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // (|g> - i|e>)/√2 should end in |e>; any ground weight is an error.
        let minus_i =
            StateVector::from_amplitudes(layout, vec![c(r, 0.0), c(0.0, -r)]).unwrap();
        let out = hadamard_pulse(&minus_i, 0, &params).unwrap();
        let p_ground = out.state.subsystem_distribution(0).unwrap()[0];
        let series = perr(alpha).p_err;
        assert!(
            (p_ground - series).abs() < 1e-12,
            "simulated {p_ground} vs series {series}"
        );
    }

    #[test]
    fn pulse_error_series_reference_points() {
        // Zero-field limit carries its flag.
        let zero = perr(Complex64::ZERO);
        assert!(zero.zero_alpha_limit);
        assert!((zero.p_err - 0.5).abs() < 1e-15);
        // Weak fields approach the same value continuously.
        let weak = perr(c(1e-3, 0.0));
        assert!((weak.p_err - 0.5).abs() < 1e-3);
        // Strong fields follow the 1/|alpha|² falloff with the known
        // prefactor (π+2)²/64.
        let prefactor = {
            let p = std::f64::consts::PI + 2.0;
            p * p / 64.0
        };
        for lambda in [400.0f64, 2000.0] {
            let point = perr(c(lambda.sqrt(), 0.0));
            let ratio = point.p_err / (prefactor / lambda);
            assert!(
                (ratio - 1.0).abs() < 0.05,
                "λ={lambda}: P={} vs asymptote {}",
                point.p_err,
                prefactor / lambda
            );
        }
    }

    #[test]
    fn pulse_error_curve_is_monotone_on_the_reference_grid() {
        let grid = [1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0];
        let points = perr_sweep(&grid).unwrap();
        for pair in points.windows(2) {
            assert!(
                pair[1].p_err <= pair[0].p_err,
                "P_err rose between |alpha|²={} and {}",
                pair[0].alpha_sq,
                pair[1].alpha_sq
            );
        }
        assert!(points[5].p_err > 0.005 && points[5].p_err < 0.015);
    }

    #[test]
    fn sweep_rejects_non_positive_grid_values() {
        assert!(matches!(
            perr_sweep(&[1.0, 0.0]),
            Err(SimError::InvalidConfig { .. })
        ));
        assert!(matches!(
            perr_sweep(&[-3.0]),
            Err(SimError::InvalidConfig { .. })
        ));
    }

    #[test]
    fn physical_pulse_checks_its_cutoff_budget() {
        let mut params = PulseParams::physical(c(3.0, 0.0), 1.0);
        params.cutoff = 4;
        let atom = make_atom_ground();
        assert!(matches!(
            hadamard_pulse(&atom, 0, &params),
            Err(SimError::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn collapse_pulse_mode_returns_a_pure_atom_state() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let params = PulseParams::physical(c(4.0, 0.0), 1.0);
        let out = hadamard_pulse(&make_atom_ground(), 0, &params).unwrap();
        let (state, count) = out.collapse_pulse_mode(&mut rng).unwrap();
        assert!(count.is_some());
        assert_eq!(state.layout().subsystem_count(), 1);
        assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn exchange_preserves_norm_and_inverts(
                gamma in 0.2f64..3.0,
                t in -2.0f64..2.0,
                seed in 0u64..500,
            ) {
                let cutoff = 5;
                let layout = atom_mode_layout(cutoff);
                let dim = layout.total_dim();
                // Deterministic pseudo-random state with an empty top rung.
                let mut amps: Vec<Complex64> = (0..dim)
                    .map(|k| {
                        let x = ((k as f64 + 1.3) * (seed as f64 + 0.7)).sin();
                        let y = ((k as f64 + 2.1) * (seed as f64 + 1.9)).cos();
                        c(x, y)
                    })
                    .collect();
                let top = layout.basis_index(&[1, cutoff - 1]).unwrap();
                amps[top] = Complex64::ZERO;
                let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                let scale = norm.sqrt().recip();
                for a in &mut amps { *a *= scale; }
                let s = StateVector::from_amplitudes(layout, amps).unwrap();
                let params = JCParams::new(gamma, t);
                let fwd = jc_evolve(&s, 0, 1, &params).unwrap();
                prop_assert!((fwd.norm_sqr() - 1.0).abs() < 1e-12);
                let back = jc_evolve(&fwd, 0, 1, &JCParams::new(gamma, -t)).unwrap();
                prop_assert!(back.fidelity_to(&s).unwrap() > 1.0 - 1e-12);
            }

            #[test]
            fn error_series_is_a_probability(lambda in 1e-6f64..500.0) {
                // Below |alpha|² ≈ 1 the curve oscillates and can exceed 1/2;
                // it is still a ground-state probability, so it stays in [0,1].
                let p = perr(c(lambda.sqrt(), 0.0)).p_err;
                prop_assert!(p > 0.0 && p <= 1.0 + 1e-9);
                if lambda >= 10.0 {
                    prop_assert!(p < 0.2);
                }
            }
        }
    }
}
