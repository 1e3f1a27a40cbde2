//! Spectrum shrinkage: universal threshold, hard/soft thresholding, and
//! empirical Wiener attenuation.
//!
//! All rules are elementwise on a group's core spectrum. One generic pair
//! of threshold functions covers both the complex rules (modulus test,
//! phase preserved exactly) and the real ones (absolute value test, sign
//! preserved): for real elements the modulus is `|x|` and rescaling by a
//! nonnegative real reproduces `sign(x)(|x| - delta)+`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{CdidError, Result};
use crate::scalar::{Element, Scalar};
use crate::tensor::Tensor;

/// Hard (keep-or-kill) vs. soft (shrink-toward-zero) thresholding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    Hard,
    Soft,
}

/// Inputs of the universal threshold rule.
#[derive(Clone, Copy, Debug)]
pub struct ThresholdSpec<F: Scalar> {
    /// Dimensionless tuning multiplier.
    pub eta: F,
    /// Noise standard deviation in complex-field units.
    pub sigma: F,
    pub mode: ThresholdMode,
    /// Number of complex group samples `N1 * N2 * J`.
    pub group_card: usize,
}

/// Universal threshold `eta * sigma * sqrt(2 * ln(group_card))`, natural
/// logarithm.
pub fn universal_threshold<F: Scalar>(spec: &ThresholdSpec<F>) -> F {
    let card = F::lit(spec.group_card as f64);
    spec.eta * spec.sigma * (F::lit(2.0) * card.ln()).sqrt()
}

/// Hard thresholding in place: an element survives iff its modulus is at
/// least `delta`. Returns the number of nonzero surviving elements, the
/// group's retained count.
pub fn hard_threshold<E: Element>(core: &mut Tensor<E>, delta: E::Real) -> usize {
    let mut retained = 0usize;
    for x in core.data_mut() {
        if x.modulus() >= delta {
            if *x != E::zero() {
                retained += 1;
            }
        } else {
            *x = E::zero();
        }
    }
    retained
}

/// Soft thresholding in place: the modulus is shrunk by `delta` and floored
/// at zero; the phase (sign, for real elements) of survivors is preserved
/// exactly because the element is rescaled by a nonnegative real. Returns
/// the number of nonzero surviving elements.
pub fn soft_threshold<E: Element>(core: &mut Tensor<E>, delta: E::Real) -> usize {
    let mut retained = 0usize;
    if delta == E::Real::zero() {
        // Identity, bit-exact; also avoids 0/0 on zero elements below.
        return core.data().iter().filter(|&&x| x != E::zero()).count();
    }
    for x in core.data_mut() {
        let m = x.modulus();
        if m > delta {
            *x = x.scale((m - delta) / m);
            retained += 1;
        } else {
            *x = E::zero();
        }
    }
    retained
}

/// Empirical Wiener attenuation in place: each element of `noisy` is
/// scaled by `w = |pilot|^2 / (|pilot|^2 + sigma^2)` using the matching
/// pilot element; `w` is defined as 0 when both terms vanish. Returns the
/// accumulated weight energy `sum(w^2)` used for aggregation.
pub fn wiener_attenuate<E: Element>(
    noisy: &mut Tensor<E>,
    pilot: &Tensor<E>,
    sigma: E::Real,
) -> Result<E::Real> {
    if noisy.dims() != pilot.dims() {
        return Err(CdidError::DimensionMismatch(format!(
            "Wiener attenuation of {:?} spectrum against {:?} pilot",
            noisy.dims(),
            pilot.dims()
        )));
    }
    let sigma_sq = sigma * sigma;
    let mut energy = E::Real::zero();
    for (x, p) in noisy.data_mut().iter_mut().zip(pilot.data()) {
        let ps = p.modulus_sq();
        let denom = ps + sigma_sq;
        let w = if denom > E::Real::zero() {
            ps / denom
        } else {
            E::Real::zero()
        };
        *x = x.scale(w);
        energy += w * w;
    }
    Ok(energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use std::f64::consts::PI;

    type C64 = Complex<f64>;

    fn tensor_c(values: Vec<C64>) -> Tensor<C64> {
        let n = values.len();
        Tensor::from_vec(&[n, 1], values).unwrap()
    }

    fn tensor_r(values: Vec<f64>) -> Tensor<f64> {
        let n = values.len();
        Tensor::from_vec(&[n, 1], values).unwrap()
    }

    #[test]
    fn universal_threshold_matches_frozen_evaluation() {
        // Independently evaluated: sqrt(2 * ln(8*8*32)) = sqrt(22 * ln 2).
        let spec = ThresholdSpec {
            eta: 1.0f64,
            sigma: 1.0,
            mode: ThresholdMode::Hard,
            group_card: 8 * 8 * 32,
        };
        assert!((universal_threshold(&spec) - 3.9050272684).abs() < 1e-9);
        // Zero noise and eta-linearity.
        let zero = ThresholdSpec { sigma: 0.0, ..spec };
        assert_eq!(universal_threshold(&zero), 0.0);
        let doubled = ThresholdSpec { eta: 2.0, ..spec };
        assert!(
            (universal_threshold(&doubled) - 2.0 * universal_threshold(&spec)).abs() < 1e-12
        );
    }

    #[test]
    fn hard_threshold_keeps_at_and_above_delta() {
        let mut t = tensor_c(vec![
            Complex::from_polar(2.0, PI / 3.0),
            Complex::from_polar(0.5, PI / 3.0),
            Complex::from_polar(1.0, -0.2), // exactly at delta: kept
        ]);
        let retained = hard_threshold(&mut t, 1.0);
        assert_eq!(retained, 2);
        assert_eq!(t.data()[0], Complex::from_polar(2.0, PI / 3.0));
        assert_eq!(t.data()[1], Complex::new(0.0, 0.0));
        assert_eq!(t.data()[2], Complex::from_polar(1.0, -0.2));
    }

    #[test]
    fn hard_threshold_zero_delta_is_identity() {
        let orig = vec![Complex::new(1.0, -2.0), Complex::new(-0.25, 0.0)];
        let mut t = tensor_c(orig.clone());
        let retained = hard_threshold(&mut t, 0.0);
        assert_eq!(retained, 2);
        assert_eq!(t.data(), orig.as_slice());
    }

    #[test]
    fn soft_threshold_shrinks_modulus_and_preserves_phase() {
        let mut t = tensor_c(vec![Complex::from_polar(2.0, PI / 4.0)]);
        let retained = soft_threshold(&mut t, 0.5);
        assert_eq!(retained, 1);
        let out = t.data()[0];
        assert!((out.norm() - 1.5).abs() < 1e-15);
        // Phase is preserved up to the rounding of re*w / im*w (one ulp).
        assert!((out.arg() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn soft_threshold_kills_modulus_at_or_below_delta() {
        let mut t = tensor_c(vec![Complex::from_polar(0.5, 1.0)]);
        assert_eq!(soft_threshold(&mut t, 0.5), 0);
        assert_eq!(t.data()[0], Complex::new(0.0, 0.0));
    }

    #[test]
    fn real_threshold_rules_match_sign_forms() {
        let mut h = tensor_r(vec![-3.0, 0.9, 1.0]);
        assert_eq!(hard_threshold(&mut h, 1.0), 2);
        assert_eq!(h.data(), &[-3.0, 0.0, 1.0]);

        let mut s = tensor_r(vec![-3.0, 0.5]);
        assert_eq!(soft_threshold(&mut s, 1.0), 1);
        assert!((s.data()[0] + 2.0).abs() < 1e-15, "sign(x)(|x|-delta)+");
        assert_eq!(s.data()[1], 0.0);
    }

    #[test]
    fn thresholds_are_idempotent_and_monotone_in_delta() {
        let values: Vec<C64> = (0..40)
            .map(|i| Complex::from_polar(0.1 * i as f64, 0.37 * i as f64))
            .collect();
        let mut once = tensor_c(values.clone());
        let r1 = hard_threshold(&mut once, 1.7);
        let mut twice = once.clone();
        let r2 = hard_threshold(&mut twice, 1.7);
        assert_eq!(once.data(), twice.data());
        assert_eq!(r1, r2);

        let mut prev = usize::MAX;
        for k in 0..10 {
            let mut t = tensor_c(values.clone());
            let r = soft_threshold(&mut t, 0.5 * k as f64);
            assert!(r <= prev, "retained count must not grow with delta");
            prev = r;
        }
    }

    #[test]
    fn wiener_attenuation_matches_direct_formula() {
        // |pilot| = sigma gives w = 1/2 elementwise.
        let mut noisy = tensor_c(vec![Complex::new(4.0, -2.0)]);
        let pilot = tensor_c(vec![Complex::new(0.0, 3.0)]);
        let energy = wiener_attenuate(&mut noisy, &pilot, 3.0).unwrap();
        assert_eq!(noisy.data()[0], Complex::new(2.0, -1.0));
        assert!((energy - 0.25).abs() < 1e-15);
    }

    #[test]
    fn wiener_zero_pilot_and_zero_sigma_edge_cases() {
        let mut noisy = tensor_c(vec![Complex::new(1.0, 1.0), Complex::new(2.0, 0.0)]);
        let pilot = tensor_c(vec![Complex::new(0.0, 0.0), Complex::new(5.0, 0.0)]);
        // sigma = 0: w = 1 where the pilot is nonzero, 0 where 0/0 occurs.
        let energy = wiener_attenuate(&mut noisy, &pilot, 0.0).unwrap();
        assert_eq!(noisy.data()[0], Complex::new(0.0, 0.0));
        assert_eq!(noisy.data()[1], Complex::new(2.0, 0.0));
        assert!((energy - 1.0).abs() < 1e-15);

        let mut all_zero = tensor_c(vec![Complex::new(1.0, 1.0)]);
        let zero_pilot = tensor_c(vec![Complex::new(0.0, 0.0)]);
        let e = wiener_attenuate(&mut all_zero, &zero_pilot, 2.0).unwrap();
        assert_eq!(all_zero.data()[0], Complex::new(0.0, 0.0));
        assert_eq!(e, 0.0);
    }

    #[test]
    fn variational_consistency_on_a_coarse_grid() {
        // hard with delta = sqrt(2a) minimizes 0.5|x-y|^2 + a*||y||_0 and
        // soft with delta = a is the l1 prox; check both on a coarse grid
        // of candidate minimizers for a handful of real inputs.
        let alpha = 0.8f64;
        for &x in &[-2.0f64, -1.2, -0.3, 0.4, 1.3, 2.6] {
            let grid: Vec<f64> = (-4000..=4000).map(|k| k as f64 * 1e-3).collect();

            let l0 = |y: f64| 0.5 * (x - y).powi(2) + alpha * if y == 0.0 { 0.0 } else { 1.0 };
            let best_l0 = grid
                .iter()
                .cloned()
                .min_by(|a, b| l0(*a).partial_cmp(&l0(*b)).unwrap())
                .unwrap();
            let mut t = tensor_r(vec![x]);
            hard_threshold(&mut t, (2.0 * alpha).sqrt());
            assert!(
                (t.data()[0] - best_l0).abs() < 2e-3,
                "l0 minimizer mismatch at x={x}"
            );

            let l1 = |y: f64| 0.5 * (x - y).powi(2) + alpha * y.abs();
            let best_l1 = grid
                .iter()
                .cloned()
                .min_by(|a, b| l1(*a).partial_cmp(&l1(*b)).unwrap())
                .unwrap();
            let mut t = tensor_r(vec![x]);
            soft_threshold(&mut t, alpha);
            assert!(
                (t.data()[0] - best_l1).abs() < 2e-3,
                "l1 prox mismatch at x={x}"
            );
        }
    }
}
