//! Synthetic test scenes: a phase surface with an amplitude surface tied to
//! it by an affine law, plus the two built-in phase generators.
//!
//! A scene is built from any real-valued source image: the source is
//! rescaled onto the target phase interval for its kind, and the amplitude
//! is an affine map of that phase chosen so the amplitude minimum is 0.5
//! and its mean is 1.0 — the two constraints pin the map uniquely.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{CdidError, Result};
use crate::field::ComplexField;
use crate::scalar::{Element, Scalar};

/// Whether the phase surface is read modulo 2π or as an unbounded height map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SceneKind {
    /// Phase spans `[0, π/2]`; metrics compare principal values directly.
    Interferometric,
    /// Phase is a smooth multi-turn surface (default span `[0, 16π]`);
    /// absolute metrics need unwrapping.
    Absolute,
}

/// A noise-free ground-truth scene: phase and amplitude surfaces.
#[derive(Clone, Debug)]
pub struct TestScene<F: Scalar> {
    pub name: String,
    pub kind: SceneKind,
    pub height: usize,
    pub width: usize,
    /// Phase surface in radians, row-major, spanning `[0, max]` for the
    /// kind's target interval.
    pub phase: Vec<F>,
    /// Amplitude surface, row-major; minimum 0.5 and mean 1.0 by
    /// construction.
    pub amplitude: Vec<F>,
}

impl<F: Scalar> TestScene<F>
where
    Complex<F>: Element<Real = F>,
{
    /// The clean complex observation `a · e^{jφ}`; a multi-turn phase is
    /// folded into the principal interval by the exponential itself.
    pub fn complex_field(&self) -> Result<ComplexField<F>> {
        ComplexField::from_polar(self.height, self.width, &self.amplitude, &self.phase)
    }
}

impl<F: Scalar> TestScene<F> {
    pub fn mean_amplitude(&self) -> F {
        let sum: F = self.amplitude.iter().copied().sum();
        sum / F::lit(self.amplitude.len() as f64)
    }
}

/// Builds a scene with the default phase span for `kind`: `[0, π/2]` for
/// interferometric scenes, `[0, 16π]` for absolute ones.
pub fn build_scene<F: Scalar>(
    name: &str,
    source: &[F],
    height: usize,
    width: usize,
    kind: SceneKind,
) -> Result<TestScene<F>> {
    let span = match kind {
        SceneKind::Interferometric => F::FRAC_PI_2(),
        SceneKind::Absolute => F::lit(16.0) * F::PI(),
    };
    build_scene_to_span(name, source, height, width, kind, span)
}

/// Builds a scene whose phase is the min-max rescale of `source` onto
/// `[0, phase_max]`, with the amplitude law described at module level.
pub fn build_scene_to_span<F: Scalar>(
    name: &str,
    source: &[F],
    height: usize,
    width: usize,
    kind: SceneKind,
    phase_max: F,
) -> Result<TestScene<F>> {
    if source.len() != height * width {
        return Err(CdidError::DimensionMismatch(format!(
            "scene source has {} samples for a {height}x{width} field",
            source.len()
        )));
    }
    if source.iter().any(|&x| !num_traits::Float::is_finite(x)) {
        return Err(CdidError::NonFinite("scene phase source"));
    }
    if !(phase_max > F::zero()) {
        return Err(CdidError::DegenerateScene(format!(
            "phase span must be positive, got {phase_max}"
        )));
    }
    let lo = source.iter().copied().fold(F::infinity(), F::min);
    let hi = source.iter().copied().fold(F::neg_infinity(), F::max);
    if !(hi > lo) {
        return Err(CdidError::DegenerateScene(
            "constant phase source cannot be rescaled".into(),
        ));
    }
    // Normalize to [0, 1] first so both endpoints are attained exactly,
    // then scale; folding the two steps would round the upper endpoint.
    let range = hi - lo;
    let phase: Vec<F> = source
        .iter()
        .map(|&x| (x - lo) / range * phase_max)
        .collect();

    let n = F::lit(phase.len() as f64);
    let pmin = phase.iter().copied().fold(F::infinity(), F::min);
    let pmean = phase.iter().copied().sum::<F>() / n;
    if !(pmean > pmin) {
        return Err(CdidError::DegenerateScene(
            "phase mean equals phase minimum; amplitude law is unsolvable".into(),
        ));
    }
    // a = c0 + c1·φ with min(a) = 0.5 (at φ = pmin) and mean(a) = 1.0.
    let half = F::lit(0.5);
    let c1 = half / (pmean - pmin);
    let c0 = half - c1 * pmin;
    let amplitude: Vec<F> = phase.iter().map(|&p| c0 + c1 * p).collect();

    Ok(TestScene {
        name: name.to_string(),
        kind,
        height,
        width,
        phase,
        amplitude,
    })
}

/// Fraction of the short field side used as the Gaussian radius `ρ`.
const GAUSS_RHO_FRACTION: f64 = 0.3;
/// Plateau level: the bump is clipped at this fraction of its unit peak.
const GAUSS_CLIP_LEVEL: f64 = 0.7;

/// Centered isotropic Gaussian bump `exp(−(r/ρ)²)` with `ρ` a fixed
/// fraction of the short side, clipped into a flat top. Output is in
/// generator units; pass it through [`build_scene`] for scaling.
pub fn truncated_gauss_source<F: Scalar>(height: usize, width: usize) -> Vec<F> {
    let rho = F::lit(GAUSS_RHO_FRACTION * height.min(width) as f64);
    let cy = F::lit((height as f64 - 1.0) / 2.0);
    let cx = F::lit((width as f64 - 1.0) / 2.0);
    let clip = F::lit(GAUSS_CLIP_LEVEL);
    let mut out = Vec::with_capacity(height * width);
    for r in 0..height {
        for c in 0..width {
            let dy = (F::lit(r as f64) - cy) / rho;
            let dx = (F::lit(c as f64) - cx) / rho;
            let g = (-(dy * dy + dx * dx)).exp();
            out.push(g.min(clip));
        }
    }
    out
}

/// The four fixed hills: (row fraction, column fraction, radius fraction
/// of the short side, relative height).
const HILLS: [(f64, f64, f64, f64); 4] = [
    (0.30, 0.30, 0.18, 1.0),
    (0.70, 0.35, 0.15, 0.8),
    (0.40, 0.75, 0.20, 0.9),
    (0.75, 0.70, 0.12, 0.6),
];

/// Sum of four pinned Gaussian hills, in generator units.
pub fn hills_source<F: Scalar>(height: usize, width: usize) -> Vec<F> {
    let side = height.min(width) as f64;
    let mut out = vec![F::zero(); height * width];
    for &(fy, fx, fr, amp) in &HILLS {
        let cy = F::lit(fy * (height as f64 - 1.0));
        let cx = F::lit(fx * (width as f64 - 1.0));
        let rho = F::lit(fr * side);
        let a = F::lit(amp);
        for r in 0..height {
            for c in 0..width {
                let dy = (F::lit(r as f64) - cy) / rho;
                let dx = (F::lit(c as f64) - cx) / rho;
                out[r * width + c] += a * (-(dy * dy + dx * dx)).exp();
            }
        }
    }
    out
}

/// The truncated-Gauss built-in scene at its default span for `kind`.
pub fn gauss_scene<F: Scalar>(height: usize, width: usize, kind: SceneKind) -> Result<TestScene<F>> {
    build_scene("gauss", &truncated_gauss_source(height, width), height, width, kind)
}

/// The hills built-in scene; its absolute span is `[0, 20π]`.
pub fn hills_scene<F: Scalar>(height: usize, width: usize, kind: SceneKind) -> Result<TestScene<F>> {
    let span = match kind {
        SceneKind::Interferometric => F::FRAC_PI_2(),
        SceneKind::Absolute => F::lit(20.0) * F::PI(),
    };
    build_scene_to_span("hills", &hills_source(height, width), height, width, kind, span)
}

/// Names of the built-in scene generators, in the order benchmark grids
/// use them by default.
pub const BUILT_IN_SCENES: [&str; 2] = ["gauss", "hills"];

/// Looks up a built-in scene generator by name.
pub fn scene_by_name<F: Scalar>(
    name: &str,
    height: usize,
    width: usize,
    kind: SceneKind,
) -> Result<TestScene<F>> {
    match name {
        "gauss" => gauss_scene(height, width, kind),
        "hills" => hills_scene(height, width, kind),
        other => Err(CdidError::InvalidConfig(format!(
            "unknown built-in scene {other:?} (expected one of {BUILT_IN_SCENES:?})"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn min_max(v: &[f64]) -> (f64, f64) {
        (
            v.iter().copied().fold(f64::INFINITY, f64::min),
            v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    #[test]
    fn ramp_source_spans_the_interferometric_interval_exactly() {
        let source: Vec<f64> = (0..64).map(|i| 3.0 + 0.25 * i as f64).collect();
        let scene = build_scene("ramp", &source, 8, 8, SceneKind::Interferometric).unwrap();
        let (lo, hi) = min_max(&scene.phase);
        assert_eq!(lo, 0.0);
        assert_eq!(hi, std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn amplitude_law_holds_for_both_generators() {
        for scene in [
            gauss_scene::<f64>(64, 64, SceneKind::Interferometric).unwrap(),
            hills_scene::<f64>(64, 48, SceneKind::Interferometric).unwrap(),
        ] {
            let (lo, _) = min_max(&scene.amplitude);
            assert!((lo - 0.5).abs() < 1e-9, "amplitude minimum {lo}");
            let m = mean(&scene.amplitude);
            assert!((m - 1.0).abs() < 1e-9, "amplitude mean {m}");
        }
    }

    #[test]
    fn absolute_spans_are_sixteen_and_twenty_pi() {
        let g = gauss_scene::<f64>(48, 48, SceneKind::Absolute).unwrap();
        let (lo, hi) = min_max(&g.phase);
        assert_eq!(lo, 0.0);
        assert_eq!(hi, 16.0 * std::f64::consts::PI);

        let h = hills_scene::<f64>(48, 48, SceneKind::Absolute).unwrap();
        let (lo, hi) = min_max(&h.phase);
        assert_eq!(lo, 0.0);
        assert_eq!(hi, 20.0 * std::f64::consts::PI);
    }

    #[test]
    fn gauss_source_is_clipped_into_a_plateau() {
        let source: Vec<f64> = truncated_gauss_source(65, 65);
        let (_, hi) = min_max(&source);
        assert_eq!(hi, GAUSS_CLIP_LEVEL);
        let at_top = source.iter().filter(|&&x| x == GAUSS_CLIP_LEVEL).count();
        assert!(at_top > 1, "clipping should flatten more than one pixel");
    }

    #[test]
    fn complex_field_matches_polar_surfaces() {
        let scene = gauss_scene::<f64>(16, 16, SceneKind::Interferometric).unwrap();
        let u = scene.complex_field().unwrap();
        for i in 0..scene.phase.len() {
            let z = u.data()[i];
            assert!((z.norm() - scene.amplitude[i]).abs() < 1e-12);
            // Interferometric phases live in [0, π/2]: arg is the phase itself.
            assert!((z.arg() - scene.phase[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn multi_turn_phase_folds_into_principal_values() {
        let scene = gauss_scene::<f64>(16, 16, SceneKind::Absolute).unwrap();
        let u = scene.complex_field().unwrap();
        for i in 0..scene.phase.len() {
            let z = u.data()[i];
            let expected = Complex::from_polar(scene.amplitude[i], scene.phase[i]);
            assert!((z - expected).norm() < 1e-9);
        }
    }

    #[test]
    fn constant_source_is_rejected() {
        let err = build_scene::<f64>("flat", &[2.0; 16], 4, 4, SceneKind::Interferometric);
        assert!(matches!(err, Err(CdidError::DegenerateScene(_))));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let err = build_scene::<f64>("bad", &[0.0, 1.0], 4, 4, SceneKind::Interferometric);
        assert!(matches!(err, Err(CdidError::DimensionMismatch(_))));
    }
}
