//! Group-wise sparse denoising of complex-valued images.
//!
//! The crate implements a two-stage nonlocal filter for complex fields
//! (hard-threshold pilot, then empirical Wiener), an iterative variant,
//! three sparsity domains (complex, real/imaginary, amplitude/phase), the
//! HOSVD group transforms underneath them, and the simulation, metric, and
//! benchmark machinery used to evaluate the filters.

pub mod bench;
pub mod config;
pub mod error;
pub mod field;
pub mod grouping;
pub mod hosvd;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod noise;
pub mod phase;
pub mod pipeline;
pub mod scalar;
pub mod scene;
pub mod shrinkage;
pub mod sparsity;
pub mod stats;
pub mod tensor;

pub use error::{CdidError, Result};
pub use scalar::{Element, Scalar};
pub use tensor::{Matrix, Tensor};

/// Double-precision complex image, the working type of the CLI and the
/// file formats.
pub type Field64 = field::ComplexField<f64>;
/// Single-precision complex image.
pub type Field32 = field::ComplexField<f32>;
/// Double-precision filter configuration.
pub type Config64 = config::FilterConfig<f64>;
/// Single-precision filter configuration.
pub type Config32 = config::FilterConfig<f32>;
/// Double-precision complex tensor (patch groups, spectra).
pub type Tensor64 = Tensor<num_complex::Complex<f64>>;
/// Single-precision complex tensor.
pub type Tensor32 = Tensor<num_complex::Complex<f32>>;
/// Double-precision ground-truth scene.
pub type Scene64 = scene::TestScene<f64>;
/// Double-precision criterion report.
pub type Report64 = metrics::MetricReport<f64>;
