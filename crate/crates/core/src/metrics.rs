//! Accuracy criteria comparing a denoised field against ground truth:
//! peak-signal ratios for phase and amplitude, shift-compensated RMSE of
//! absolute phase, and complex-domain SNR.
//!
//! All phase-difference metrics wrap the per-pixel error onto `[-pi, pi)`
//! so whole-turn offsets never count as error; the absolute-phase metrics
//! additionally remove one global shift `delta = 2*pi*k` estimated from the
//! mean difference, since an unwrapped surface is only defined up to whole
//! turns. dB-valued metrics return `+inf` when the error is exactly zero.

use num_complex::Complex;

use crate::error::{CdidError, Result};
use crate::field::ComplexField;
use crate::phase::{unwrap_field, wrap_phase};
use crate::scalar::{Element, Scalar};
use crate::scene::{SceneKind, TestScene};

/// The full criterion set for one (estimate, ground truth) pair.
///
/// dB fields hold `+inf` when the corresponding error vanishes;
/// `delta_phi_shift` is the whole-turn offset removed from both
/// absolute-phase criteria.
#[derive(Clone, Copy, Debug)]
pub struct MetricReport<F: Scalar> {
    /// Peak-signal ratio of wrapped phase error, dB.
    pub psnr_phi: F,
    /// Peak-signal ratio of amplitude error, dB.
    pub psnr_ampl: F,
    /// Shift-compensated RMSE of absolute phase, radians.
    pub rmse_phi_abs: F,
    /// Plain RMSE of amplitude.
    pub rmse_a: F,
    /// Complex-domain SNR (phase and amplitude jointly), dB.
    pub snr_c: F,
    /// SNR of absolute phase with the same shift compensation, dB.
    pub snr_phi_abs: F,
    /// The whole-turn shift `2*pi*k` removed by the absolute-phase metrics.
    pub delta_phi_shift: F,
}

/// Named selector for one criterion of a [`MetricReport`]; the names
/// double as the benchmark CSV column headers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricKind {
    PsnrPhi,
    PsnrAmpl,
    RmsePhiAbs,
    RmseA,
    SnrC,
    SnrPhiAbs,
}

impl MetricKind {
    pub const ALL: [MetricKind; 6] = [
        MetricKind::PsnrPhi,
        MetricKind::PsnrAmpl,
        MetricKind::RmsePhiAbs,
        MetricKind::RmseA,
        MetricKind::SnrC,
        MetricKind::SnrPhiAbs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::PsnrPhi => "psnr_phi",
            MetricKind::PsnrAmpl => "psnr_ampl",
            MetricKind::RmsePhiAbs => "rmse_phi_abs",
            MetricKind::RmseA => "rmse_a",
            MetricKind::SnrC => "snr_c",
            MetricKind::SnrPhiAbs => "snr_phi_abs",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        MetricKind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| {
                CdidError::InvalidConfig(format!(
                    "unknown metric {name:?} (expected one of {:?})",
                    MetricKind::ALL.map(MetricKind::name)
                ))
            })
    }
}

impl<F: Scalar> MetricReport<F> {
    /// The criterion value selected by `kind`.
    pub fn get(&self, kind: MetricKind) -> F {
        match kind {
            MetricKind::PsnrPhi => self.psnr_phi,
            MetricKind::PsnrAmpl => self.psnr_ampl,
            MetricKind::RmsePhiAbs => self.rmse_phi_abs,
            MetricKind::RmseA => self.rmse_a,
            MetricKind::SnrC => self.snr_c,
            MetricKind::SnrPhiAbs => self.snr_phi_abs,
        }
    }
}

fn require_same_len<T>(est: &[T], truth: &[T]) -> Result<()> {
    if est.len() != truth.len() {
        return Err(CdidError::DimensionMismatch(format!(
            "metric planes differ in size: estimate {}, truth {}",
            est.len(),
            truth.len()
        )));
    }
    if est.is_empty() {
        return Err(CdidError::DimensionMismatch(
            "metric over empty planes".into(),
        ));
    }
    Ok(())
}

fn db<F: Scalar>(ratio: F) -> F {
    F::lit(10.0) * ratio.log10()
}

/// Peak-signal ratio of the wrapped phase error:
/// `10*log10(n*(2*pi)^2 / sum(wrap(est - truth)^2))`, in dB.
///
/// Wrapping each per-pixel difference makes the result invariant to adding
/// whole turns to either argument. Returns `+inf` for zero error.
pub fn psnr_phi<F: Scalar>(est_phase: &[F], true_phase: &[F]) -> Result<F> {
    require_same_len(est_phase, true_phase)?;
    let err_sq: F = est_phase
        .iter()
        .zip(true_phase)
        .map(|(&e, &t)| {
            let w = wrap_phase(e - t);
            w * w
        })
        .sum();
    if err_sq == F::zero() {
        return Ok(F::infinity());
    }
    let n = F::lit(est_phase.len() as f64);
    let two_pi = F::PI() + F::PI();
    Ok(db(n * two_pi * two_pi / err_sq))
}

/// Peak-signal ratio of the amplitude error:
/// `10*log10(n*max(truth)^2 / sum((est - truth)^2))`, in dB.
///
/// The peak is taken over the true amplitude; an all-zero truth has no
/// peak and is rejected. Returns `+inf` for zero error.
pub fn psnr_ampl<F: Scalar>(est_a: &[F], true_a: &[F]) -> Result<F> {
    require_same_len(est_a, true_a)?;
    let peak = true_a.iter().copied().fold(F::zero(), F::max);
    if peak == F::zero() {
        return Err(CdidError::DegenerateScene(
            "all-zero true amplitude has no peak".into(),
        ));
    }
    let err_sq: F = est_a
        .iter()
        .zip(true_a)
        .map(|(&e, &t)| (e - t) * (e - t))
        .sum();
    if err_sq == F::zero() {
        return Ok(F::infinity());
    }
    let n = F::lit(est_a.len() as f64);
    Ok(db(n * peak * peak / err_sq))
}

/// The global whole-turn shift `2*pi*k` separating two absolute-phase
/// planes: `k` is the whole number of turns nearest to the mean difference,
/// with a mean difference within 1e-9 of a half turn resolving toward the
/// smaller magnitude (so an exact half-turn offset is left uncompensated).
///
/// Rounding to the nearest turn is what makes the compensated metrics
/// invariant under adding whole turns to either plane: the turn count
/// shifts by exactly k and rounds to the same residual. It is also the
/// whole-turn shift that minimizes the residual RMSE.
fn whole_turn_shift<F: Scalar>(est_abs: &[F], true_abs: &[F]) -> F {
    let n = F::lit(est_abs.len() as f64);
    let mean_diff: F = est_abs
        .iter()
        .zip(true_abs)
        .map(|(&e, &t)| e - t)
        .sum::<F>()
        / n;
    let two_pi = F::PI() + F::PI();
    let turns = mean_diff / two_pi;
    let frac = turns - turns.trunc();
    let k = if (frac.abs() - F::lit(0.5)).abs() < F::lit(1e-9) {
        turns.trunc()
    } else {
        turns.round()
    };
    two_pi * k
}

/// Shift-compensated RMSE between absolute-phase planes.
///
/// Returns `(rmse, delta)` where `delta` is the whole-turn shift described
/// at [`whole_turn_shift`] and
/// `rmse = sqrt(mean((truth - est + delta)^2))`.
pub fn rmse_abs_phase<F: Scalar>(est_abs: &[F], true_abs: &[F]) -> Result<(F, F)> {
    require_same_len(est_abs, true_abs)?;
    let delta = whole_turn_shift(est_abs, true_abs);
    let n = F::lit(est_abs.len() as f64);
    let err_sq: F = est_abs
        .iter()
        .zip(true_abs)
        .map(|(&e, &t)| {
            let d = t - e + delta;
            d * d
        })
        .sum();
    Ok(((err_sq / n).sqrt(), delta))
}

/// Plain root-mean-square error between two real planes.
pub fn rmse<F: Scalar>(est: &[F], truth: &[F]) -> Result<F> {
    require_same_len(est, truth)?;
    let n = F::lit(est.len() as f64);
    let err_sq: F = est
        .iter()
        .zip(truth)
        .map(|(&e, &t)| (e - t) * (e - t))
        .sum();
    Ok((err_sq / n).sqrt())
}

/// Complex-domain SNR: `10*log10(sum|truth - mean(truth)|^2 /
/// sum|truth - est|^2)`, in dB — phase and amplitude accuracy jointly.
///
/// A constant true field has zero numerator and is rejected; zero error
/// returns `+inf`.
pub fn snr_c<F: Scalar>(est: &ComplexField<F>, truth: &ComplexField<F>) -> Result<F> {
    if est.height() != truth.height() || est.width() != truth.width() {
        return Err(CdidError::DimensionMismatch(format!(
            "fields differ in shape: estimate {}x{}, truth {}x{}",
            est.height(),
            est.width(),
            truth.height(),
            truth.width()
        )));
    }
    let n = F::lit(truth.data().len() as f64);
    let mut mean = Complex::new(F::zero(), F::zero());
    for z in truth.data() {
        mean = mean + *z;
    }
    mean = Complex::new(mean.re / n, mean.im / n);
    let signal: F = truth.data().iter().map(|z| (z - mean).norm_sqr()).sum();
    if signal == F::zero() {
        return Err(CdidError::DegenerateScene(
            "constant true field has no signal variance".into(),
        ));
    }
    let err: F = truth
        .data()
        .iter()
        .zip(est.data())
        .map(|(t, e)| (t - e).norm_sqr())
        .sum();
    if err == F::zero() {
        return Ok(F::infinity());
    }
    Ok(db(signal / err))
}

/// SNR of absolute phase with the whole-turn shift removed:
/// `10*log10(sum((truth - mean(truth))^2) / sum((truth - est + delta)^2))`,
/// in dB, `delta` as in [`rmse_abs_phase`].
///
/// A constant true phase is rejected; zero error returns `+inf`.
pub fn snr_abs_phase<F: Scalar>(est_abs: &[F], true_abs: &[F]) -> Result<F> {
    require_same_len(est_abs, true_abs)?;
    let n = F::lit(true_abs.len() as f64);
    let mean_true = true_abs.iter().copied().sum::<F>() / n;
    let signal: F = true_abs
        .iter()
        .map(|&t| (t - mean_true) * (t - mean_true))
        .sum();
    if signal == F::zero() {
        return Err(CdidError::DegenerateScene(
            "constant true phase has no signal variance".into(),
        ));
    }
    let delta = whole_turn_shift(est_abs, true_abs);
    let err: F = est_abs
        .iter()
        .zip(true_abs)
        .map(|(&e, &t)| {
            let d = t - e + delta;
            d * d
        })
        .sum();
    if err == F::zero() {
        return Ok(F::infinity());
    }
    Ok(db(signal / err))
}

/// Evaluates a complex estimate against its ground-truth scene and fills
/// the full criterion set.
///
/// Phase and amplitude are extracted from the estimate as `arg` and
/// modulus. For an interferometric scene the principal phase values feed
/// the absolute-phase criteria directly; for an absolute scene the
/// estimate's principal phase is first unwrapped (row-column path), and
/// the whole-turn shift then absorbs the unwrapper's free global offset.
pub fn evaluate_estimate<F: Scalar>(
    est: &ComplexField<F>,
    scene: &TestScene<F>,
) -> Result<MetricReport<F>>
where
    Complex<F>: Element<Real = F>,
{
    if est.height() != scene.height || est.width() != scene.width {
        return Err(CdidError::DimensionMismatch(format!(
            "estimate {}x{} against scene {}x{}",
            est.height(),
            est.width(),
            scene.height,
            scene.width
        )));
    }
    let est_phase = est.phase();
    let est_ampl = est.amplitude();

    let est_abs = match scene.kind {
        SceneKind::Interferometric => est_phase.clone(),
        SceneKind::Absolute => unwrap_field(&est_phase, est.height(), est.width())?,
    };
    let (rmse_phi_abs, delta_phi_shift) = rmse_abs_phase(&est_abs, &scene.phase)?;

    Ok(MetricReport {
        psnr_phi: psnr_phi(&est_phase, &scene.phase)?,
        psnr_ampl: psnr_ampl(&est_ampl, &scene.amplitude)?,
        rmse_phi_abs,
        rmse_a: rmse(&est_ampl, &scene.amplitude)?,
        snr_c: snr_c(est, &scene.complex_field()?)?,
        snr_phi_abs: snr_abs_phase(&est_abs, &scene.phase)?,
        delta_phi_shift,
    })
}
