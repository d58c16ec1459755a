//! Run configuration shared by the protocol stages and the CLI.
//!
//! Serialized form is flat JSON so a config file (or manifest snapshot) reads
//! as one record of plain fields; every field has a default, so partial
//! configs are valid.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{KerrParams, ProbeParams};
use crate::error::SimError;
use crate::fock::{recommended_coherent_cutoff, SingleRailQubit};
use crate::jc::PulseParams;

/// Conditional probe-reference overlap below which parity readout reports a
/// diagnostic error rather than a parity label.
pub const DEFAULT_PARITY_AMBIGUITY: f64 = 1e-4;

/// Per-trial fidelity floor applied to ideal-mode campaigns when no explicit
/// threshold is configured.
pub const IDEAL_FIDELITY_FLOOR: f64 = 1.0 - 1e-9;

/// How campaign input qubits are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputSampler {
    /// Uniform over the Bloch sphere.
    Haar,
    /// Uniform over the equator: (|0> + e^{iφ}|1>)/√2.
    Equatorial,
    /// The same fixed input every trial.
    Fixed { qubit: SingleRailQubit },
}

impl InputSampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> SingleRailQubit {
        match self {
            // cos θ uniform on [-1, 1] makes the Bloch vector uniform on the
            // sphere.
            InputSampler::Haar => {
                let theta = (1.0 - 2.0 * rng.random::<f64>()).acos();
                let phi = TAU * rng.random::<f64>();
                SingleRailQubit::from_bloch(theta, phi)
            }
            InputSampler::Equatorial => {
                SingleRailQubit::from_bloch(FRAC_PI_2, TAU * rng.random::<f64>())
            }
            InputSampler::Fixed { qubit } => qubit.clone(),
        }
    }
}

/// Pass/fail thresholds consulted by campaign summaries and the CLI exit
/// code. `None` disables a check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Diagnostic floor for the parity probe's conditional reference overlap.
    pub parity_ambiguity: f64,
    /// Minimum acceptable campaign mean fidelity.
    pub min_mean_fidelity: Option<f64>,
    /// Minimum acceptable single-trial fidelity. Defaults to the ideal-mode
    /// floor when unset and `ideal_mode` is on.
    pub min_trial_fidelity: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            parity_ambiguity: DEFAULT_PARITY_AMBIGUITY,
            min_mean_fidelity: None,
            min_trial_fidelity: None,
        }
    }
}

/// Full simulation configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Real part of the shared coherent amplitude used by drive pulses and
    /// the parity probe.
    pub alpha_re: f64,
    /// Imaginary part of that amplitude. The protocol's rotation conventions
    /// assume a real positive drive; a nonzero phase is honored by the field
    /// state but rotates the pulse axis away from the correction tables.
    pub alpha_im: f64,
    /// Atom-field coupling strength.
    pub gamma: f64,
    /// Cross-Kerr strength.
    pub kappa: f64,
    /// Replace finite-amplitude pulses with their limiting rotations.
    pub ideal_mode: bool,
    /// Campaign length.
    pub trials: u64,
    /// Master seed; each trial derives its own stream from it.
    pub seed: u64,
    /// Optional floor on coherent-mode cutoffs. The effective cutoff is the
    /// larger of this and the resolution rule for |alpha|, so the rule is
    /// always satisfied.
    pub cutoff_floor: Option<usize>,
    /// Campaign input distribution.
    pub sampler: InputSampler,
    pub tolerances: Tolerances,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            alpha_re: 50f64.sqrt(),
            alpha_im: 0.0,
            gamma: 1.0,
            kappa: 1.0,
            ideal_mode: false,
            trials: 1000,
            seed: 7013,
            cutoff_floor: None,
            sampler: InputSampler::Haar,
            tolerances: Tolerances::default(),
        }
    }
}

impl SimConfig {
    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.alpha_re, self.alpha_im)
    }

    pub fn set_alpha_sq(&mut self, alpha_sq: f64) {
        self.alpha_re = alpha_sq.sqrt();
        self.alpha_im = 0.0;
    }

    /// Fock cutoff for every coherent mode this run prepares.
    pub fn coherent_cutoff(&self) -> usize {
        recommended_coherent_cutoff(self.alpha()).max(self.cutoff_floor.unwrap_or(0))
    }

    /// Drive-pulse realization for this run.
    pub fn pulse_params(&self) -> PulseParams {
        if self.ideal_mode {
            PulseParams::ideal()
        } else {
            PulseParams {
                alpha: self.alpha(),
                gamma: self.gamma,
                cutoff: self.coherent_cutoff(),
                ideal: false,
            }
        }
    }

    /// Parity-probe realization for this run. The probe is exact at any
    /// amplitude, so it stays physical even in ideal mode.
    pub fn probe_params(&self) -> ProbeParams {
        ProbeParams {
            alpha: self.alpha(),
            kerr: KerrParams::parity_mapping(self.kappa),
            cutoff: self.coherent_cutoff(),
            ambiguity_tol: self.tolerances.parity_ambiguity,
        }
    }

    /// Effective per-trial fidelity floor (explicit, or the ideal-mode
    /// default).
    pub fn trial_fidelity_floor(&self) -> Option<f64> {
        self.tolerances.min_trial_fidelity.or(if self.ideal_mode {
            Some(IDEAL_FIDELITY_FLOOR)
        } else {
            None
        })
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |reason: String| Err(SimError::InvalidConfig { reason });
        if self.trials < 1 {
            return fail("trials must be at least 1".into());
        }
        if !self.gamma.is_finite() || self.gamma <= 0.0 {
            return fail(format!("gamma must be positive and finite, got {}", self.gamma));
        }
        if !self.kappa.is_finite() || self.kappa <= 0.0 {
            return fail(format!("kappa must be positive and finite, got {}", self.kappa));
        }
        if !self.alpha_re.is_finite() || !self.alpha_im.is_finite() {
            return fail("alpha must be finite".into());
        }
        if self.alpha().norm() <= 0.0 {
            // The parity probe runs on a real coherent field in every mode,
            // so a vanishing amplitude cannot classify anything.
            return fail("the drive and probe amplitude must be nonzero".into());
        }
        if !(self.tolerances.parity_ambiguity > 0.0 && self.tolerances.parity_ambiguity < 1.0) {
            return fail(format!(
                "parity_ambiguity must lie in (0,1), got {}",
                self.tolerances.parity_ambiguity
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn samplers_cover_their_distributions() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let draws = 4000;
        let mean_excited: f64 = (0..draws)
            .map(|_| InputSampler::Haar.draw(&mut rng).b().norm_sqr())
            .sum::<f64>()
            / draws as f64;
        // Haar-uniform -> |b|² uniform on [0,1]; 4σ of the mean is ~0.018.
        assert!((mean_excited - 0.5).abs() < 0.02, "{mean_excited}");

        for _ in 0..50 {
            let q = InputSampler::Equatorial.draw(&mut rng);
            assert!((q.b().norm_sqr() - 0.5).abs() < 1e-12);
        }

        let fixed = InputSampler::Fixed {
            qubit: SingleRailQubit::ket_one(),
        };
        let q = fixed.draw(&mut rng);
        assert_eq!(q.b().norm_sqr(), 1.0);
    }

    #[test]
    fn defaults_validate_and_round_trip() {
        let cfg = SimConfig::default();
        cfg.validate().unwrap();
        let json = serde_json::to_string_pretty(&cfg).unwrap();
        let back: SimConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn partial_json_fills_in_defaults() {
        let cfg: SimConfig = serde_json::from_str(r#"{"trials": 5, "ideal_mode": true}"#).unwrap();
        assert_eq!(cfg.trials, 5);
        assert!(cfg.ideal_mode);
        assert_eq!(cfg.seed, SimConfig::default().seed);
    }

    #[test]
    fn cutoff_floor_never_undercuts_the_resolution_rule() {
        let mut cfg = SimConfig::default();
        cfg.set_alpha_sq(50.0);
        let rule = recommended_coherent_cutoff(cfg.alpha());
        cfg.cutoff_floor = Some(4);
        assert_eq!(cfg.coherent_cutoff(), rule);
        cfg.cutoff_floor = Some(rule + 40);
        assert_eq!(cfg.coherent_cutoff(), rule + 40);
    }

    #[test]
    fn ideal_mode_implies_a_trial_fidelity_floor() {
        let mut cfg = SimConfig::default();
        assert!(cfg.trial_fidelity_floor().is_none());
        cfg.ideal_mode = true;
        assert_eq!(cfg.trial_fidelity_floor(), Some(IDEAL_FIDELITY_FLOOR));
        cfg.tolerances.min_trial_fidelity = Some(0.5);
        assert_eq!(cfg.trial_fidelity_floor(), Some(0.5));
    }

    #[test]
    fn bad_fields_are_rejected_with_reasons() {
        let mut cfg = SimConfig::default();
        cfg.trials = 0;
        assert!(matches!(cfg.validate(), Err(SimError::InvalidConfig { .. })));
        let mut cfg = SimConfig::default();
        cfg.gamma = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SimConfig::default();
        cfg.alpha_re = 0.0;
        assert!(cfg.validate().is_err(), "zero drive in physical mode");
        cfg.ideal_mode = true;
        assert!(
            cfg.validate().is_err(),
            "the probe still needs its field in ideal mode"
        );
    }
}
