//! Complex-valued images: row-major rectangular grids of complex samples.

use num_complex::Complex;
use num_traits::Float;

use crate::error::{CdidError, Result};
use crate::scalar::Scalar;

/// A complex-valued image. Samples are stored row-major and are finite by
/// construction, which lets every consumer skip per-pixel validation.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField<F: Scalar> {
    height: usize,
    width: usize,
    data: Vec<Complex<F>>,
}

impl<F: Scalar> ComplexField<F> {
    /// All-zero field.
    pub fn zeros(height: usize, width: usize) -> Self {
        ComplexField {
            height,
            width,
            data: vec![Complex::new(F::zero(), F::zero()); height * width],
        }
    }

    /// Builds a field from row-major samples, rejecting length mismatches
    /// and non-finite values.
    pub fn new(height: usize, width: usize, data: Vec<Complex<F>>) -> Result<Self> {
        if data.len() != height * width {
            return Err(CdidError::DimensionMismatch(format!(
                "field {height}x{width} needs {} samples, got {}",
                height * width,
                data.len()
            )));
        }
        if !data.iter().all(|z| Float::is_finite(z.re) && Float::is_finite(z.im)) {
            return Err(CdidError::NonFinite("field construction"));
        }
        Ok(ComplexField {
            height,
            width,
            data,
        })
    }

    /// Builds a field as `a * exp(j*phi)` from row-major amplitude and
    /// phase planes of equal length.
    pub fn from_polar(height: usize, width: usize, amplitude: &[F], phase: &[F]) -> Result<Self> {
        if amplitude.len() != phase.len() {
            return Err(CdidError::DimensionMismatch(format!(
                "amplitude plane has {} samples, phase plane {}",
                amplitude.len(),
                phase.len()
            )));
        }
        let data = amplitude
            .iter()
            .zip(phase)
            .map(|(&a, &p)| Complex::new(a * p.cos(), a * p.sin()))
            .collect();
        ComplexField::new(height, width, data)
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    fn idx(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.height && col < self.width);
        row * self.width + col
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex<F> {
        self.data[self.idx(row, col)]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: Complex<F>) {
        let i = self.idx(row, col);
        self.data[i] = v;
    }

    /// Row `row` as a contiguous slice.
    #[inline]
    pub fn row(&self, row: usize) -> &[Complex<F>] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    /// Row-major samples.
    #[inline]
    pub fn data(&self) -> &[Complex<F>] {
        &self.data
    }

    /// Row-major samples, mutable. Callers are responsible for keeping the
    /// finiteness invariant.
    #[inline]
    pub fn data_mut(&mut self) -> &mut [Complex<F>] {
        &mut self.data
    }

    /// Per-pixel amplitude plane `|u|`, row-major.
    pub fn amplitude(&self) -> Vec<F> {
        self.data.iter().map(|z| z.norm()).collect()
    }

    /// Per-pixel phase plane `arg(u)` in `(-pi, pi]`, row-major, with the
    /// phase of an exact zero defined as 0.
    pub fn phase(&self) -> Vec<F> {
        self.data
            .iter()
            .map(|z| {
                if z.re == F::zero() && z.im == F::zero() {
                    F::zero()
                } else {
                    z.arg()
                }
            })
            .collect()
    }

    /// Mean amplitude over all pixels.
    pub fn mean_amplitude(&self) -> F {
        let n = F::lit(self.data.len() as f64);
        self.data.iter().map(|z| z.norm()).sum::<F>() / n
    }
}
