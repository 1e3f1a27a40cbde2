//! Filter configuration: patch geometry, matching, shrinkage, and the
//! iterative schedule, with the documented defaults.

use serde::{Deserialize, Serialize};

use crate::error::{CdidError, Result};
use crate::scalar::Scalar;
use crate::shrinkage::ThresholdMode;
use crate::sparsity::SparsityType;

/// Signal the block matcher measures distances on. Only complex matching
/// is implemented; the variant list reserves room for the alternative
/// (amplitude/phase matching) without committing to it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchSignal {
    #[default]
    Complex,
}

/// How the per-iteration `delta` values of the iterative schedule are
/// interpreted when building each pass's threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IterDeltaMode {
    /// `delta_t` replaces the `eta` multiplier of the universal threshold,
    /// with `sigma` fixed to the original noise level (default).
    #[default]
    EtaMultiplier,
    /// `delta_t` is the threshold itself, in spectrum units.
    Absolute,
}

/// Complete configuration of one filtering run.
///
/// `Default` gives the documented settings: 8x8 patches, stride 3, 39x39
/// search window, groups capped at 32, complex-domain sparsity, hard
/// thresholding with `eta = 1`, no Wiener stage, `sigma = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, bound = "F: Scalar + Serialize + serde::de::DeserializeOwned")]
pub struct FilterConfig<F: Scalar> {
    /// Patch height.
    pub n1: usize,
    /// Patch width.
    pub n2: usize,
    /// Stride between reference positions.
    pub step: usize,
    /// Full side length of the (odd) square search window.
    pub search_window: usize,
    /// Maximum number of patches per group.
    pub j_max: usize,
    pub sparsity: SparsityType,
    pub threshold_mode: ThresholdMode,
    /// Universal-threshold multiplier.
    pub eta: F,
    /// Whether a Wiener stage follows the hard-threshold stage.
    pub wiener: bool,
    /// Noise standard deviation of the input field, complex units.
    pub sigma: F,
    /// Iterative schedule as `(alpha_t, delta_t)` pairs; `None` selects the
    /// built-in three-step schedule.
    pub iter_schedule: Option<Vec<(F, F)>>,
    pub iter_delta_mode: IterDeltaMode,
    pub match_signal: MatchSignal,
}

impl<F: Scalar> Default for FilterConfig<F> {
    fn default() -> Self {
        FilterConfig {
            n1: 8,
            n2: 8,
            step: 3,
            search_window: 39,
            j_max: 32,
            sparsity: SparsityType::ComplexDomain,
            threshold_mode: ThresholdMode::Hard,
            eta: F::one(),
            wiener: false,
            sigma: F::zero(),
            iter_schedule: None,
            iter_delta_mode: IterDeltaMode::default(),
            match_signal: MatchSignal::default(),
        }
    }
}

/// The built-in three-step iterative schedule `(alpha_t, delta_t)`.
pub fn default_iter_schedule<F: Scalar>() -> Vec<(F, F)> {
    vec![
        (F::lit(1.0), F::lit(0.9)),
        (F::lit(0.35), F::lit(0.5)),
        (F::lit(0.25), F::lit(0.4)),
    ]
}

impl<F: Scalar> FilterConfig<F> {
    /// Checks the structural invariants; called once at pipeline entry.
    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 || self.n2 == 0 {
            return Err(CdidError::InvalidConfig("patch extents must be positive".into()));
        }
        if self.step == 0 {
            return Err(CdidError::InvalidConfig("step must be positive".into()));
        }
        if self.search_window == 0 || self.search_window % 2 == 0 {
            return Err(CdidError::InvalidConfig(format!(
                "search window must be odd and positive, got {}",
                self.search_window
            )));
        }
        if self.j_max == 0 {
            return Err(CdidError::InvalidConfig("group size cap must be at least 1".into()));
        }
        if !(self.eta > F::zero()) {
            return Err(CdidError::InvalidConfig("eta must be positive".into()));
        }
        if !(self.sigma >= F::zero()) {
            return Err(CdidError::InvalidConfig("sigma must be nonnegative".into()));
        }
        if let Some(schedule) = &self.iter_schedule {
            if schedule.is_empty() {
                return Err(CdidError::InvalidConfig("iterative schedule must be nonempty".into()));
            }
        }
        Ok(())
    }

    /// The iterative schedule in effect: the configured one, or the
    /// built-in default.
    pub fn effective_iter_schedule(&self) -> Vec<(F, F)> {
        self.iter_schedule
            .clone()
            .unwrap_or_else(default_iter_schedule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_values() {
        let cfg = FilterConfig::<f64>::default();
        assert_eq!((cfg.n1, cfg.n2), (8, 8));
        assert_eq!(cfg.step, 3);
        assert_eq!(cfg.search_window, 39);
        assert_eq!(cfg.j_max, 32);
        assert_eq!(cfg.sparsity, SparsityType::ComplexDomain);
        assert_eq!(cfg.threshold_mode, ThresholdMode::Hard);
        assert_eq!(cfg.eta, 1.0);
        assert!(!cfg.wiener);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn default_schedule_is_the_three_step_one() {
        let s = default_iter_schedule::<f64>();
        assert_eq!(s, vec![(1.0, 0.9), (0.35, 0.5), (0.25, 0.4)]);
        assert_eq!(FilterConfig::<f64>::default().effective_iter_schedule(), s);
    }

    #[test]
    fn validation_rejects_bad_settings() {
        let mut cfg = FilterConfig::<f64>::default();
        cfg.search_window = 40;
        assert!(cfg.validate().is_err(), "even window");

        let mut cfg = FilterConfig::<f64>::default();
        cfg.eta = 0.0;
        assert!(cfg.validate().is_err(), "zero eta");

        let mut cfg = FilterConfig::<f64>::default();
        cfg.iter_schedule = Some(vec![]);
        assert!(cfg.validate().is_err(), "empty schedule");

        let mut cfg = FilterConfig::<f64>::default();
        cfg.sigma = -1.0;
        assert!(cfg.validate().is_err(), "negative sigma");
    }

    #[test]
    fn survives_serde_round_trip_with_partial_input() {
        let toml = "sigma = 0.25\nsparsity = \"re-im\"\nwiener = true";
        let cfg: FilterConfig<f64> = toml::from_str(toml).unwrap();
        assert_eq!(cfg.sigma, 0.25);
        assert_eq!(cfg.sparsity, SparsityType::ReIm);
        assert!(cfg.wiener);
        // Unspecified fields fall back to defaults.
        assert_eq!(cfg.n1, 8);

        let text = toml::to_string(&cfg).unwrap();
        let back: FilterConfig<f64> = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }
}
