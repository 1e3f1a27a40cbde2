//! Circular complex Gaussian noise injection for Monte-Carlo runs.
//!
//! The observation model is `z = u + ε` with `ε = ε_I + jε_Q`, the two
//! components independent zero-mean Gaussians of variance `σ²/2` each. The
//! noise level is parameterized by the target phase-noise standard
//! deviation `σ_φz`: `σ = σ_φz · mean(a) · √2`, so that on a unit-amplitude
//! scene the small-noise phase error std is `σ_φz` itself.
//!
//! Every `(seed, run)` pair owns an independent generator stream, so runs
//! are reproducible individually and safe to draw in parallel.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{CdidError, Result};
use crate::field::ComplexField;
use crate::scalar::{Element, Scalar};
use crate::scene::TestScene;

/// Noise level and Monte-Carlo bookkeeping for one experiment.
#[derive(Clone, Copy, Debug)]
pub struct NoiseSpec<F: Scalar> {
    /// Target phase-noise standard deviation, radians.
    pub sigma_phi: F,
    /// Base RNG seed; run `k` uses generator stream `k` of this seed.
    pub seed: u64,
    /// Number of Monte-Carlo runs.
    pub runs: usize,
}

impl<F: Scalar> NoiseSpec<F> {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_phi > F::zero() && self.sigma_phi <= F::lit(2.0)) {
            return Err(CdidError::InvalidConfig(format!(
                "sigma_phi must lie in (0, 2], got {}",
                self.sigma_phi
            )));
        }
        if self.runs == 0 {
            return Err(CdidError::InvalidConfig("runs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Complex noise std for a scene: `σ = σ_φz · mean(a) · √2`.
pub fn noise_sigma<F: Scalar>(mean_amplitude: F, sigma_phi: F) -> F {
    sigma_phi * mean_amplitude * F::SQRT_2()
}

/// One standard-normal pair via the Box-Muller transform. The uniform for
/// the radius is mapped into `(0, 1]` so the logarithm never sees zero.
fn standard_normal_pair(rng: &mut ChaCha12Rng) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

/// The noisy observation for one Monte-Carlo run: `z = a·e^{jφ} + ε`.
/// Pixels consume the stream in row-major order, one normal pair each.
pub fn make_noisy<F: Scalar>(
    scene: &TestScene<F>,
    spec: &NoiseSpec<F>,
    run: usize,
) -> Result<ComplexField<F>>
where
    Complex<F>: Element<Real = F>,
{
    spec.validate()?;
    let clean = scene.complex_field()?;
    let sigma = noise_sigma(scene.mean_amplitude(), spec.sigma_phi);
    // Each real component carries half the complex noise variance.
    let component_std = sigma / F::SQRT_2();

    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    rng.set_stream(run as u64);

    let mut data = Vec::with_capacity(clean.data().len());
    for &u in clean.data() {
        let (g_re, g_im) = standard_normal_pair(&mut rng);
        data.push(Complex::new(
            u.re + component_std * F::lit(g_re),
            u.im + component_std * F::lit(g_im),
        ));
    }
    ComplexField::new(scene.height, scene.width, data)
}
