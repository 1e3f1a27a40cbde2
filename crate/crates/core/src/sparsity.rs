//! The three sparsity domains a patch group can be filtered in.
//!
//! A group arrives as a complex 3D tensor `[N1, N2, J]`. Depending on the
//! domain it is either kept complex (Type I), split into real/imaginary
//! slabs (Type II), or split into amplitude/phase slabs (Type III); the
//! split variants form a real 4D tensor `[N1, N2, J, 2]` so one joint
//! transform couples both slabs.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{CdidError, Result};
use crate::phase::wrap_phase;
use crate::scalar::{Element, Scalar};
use crate::tensor::Tensor;

/// Which representation a group is made sparse in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SparsityType {
    /// Type I: the group stays a complex 3D tensor.
    ComplexDomain,
    /// Type II: real and imaginary parts as the two slabs of a real 4D tensor.
    ReIm,
    /// Type III: amplitude and wrapped phase as the two slabs of a real 4D tensor.
    AmPhase,
}

/// A group tensor in its filtering domain: complex 3D for Type I, real 4D
/// for Types II and III.
#[derive(Clone, Debug)]
pub enum DomainTensor<F: Scalar> {
    Complex(Tensor<Complex<F>>),
    Real(Tensor<F>),
}

/// Converts a complex group tensor `[N1, N2, J]` into the representation
/// of the given sparsity type. Type III stores the phase as its principal
/// value in `[-pi, pi)` with the phase of an exact zero defined as 0.
pub fn to_domain<F: Scalar>(group: &Tensor<Complex<F>>, s: SparsityType) -> DomainTensor<F>
where
    Complex<F>: Element<Real = F>,
{
    match s {
        SparsityType::ComplexDomain => DomainTensor::Complex(group.clone()),
        SparsityType::ReIm => {
            let mut dims = group.dims().to_vec();
            dims.push(2);
            let n = group.data().len();
            let mut data = Vec::with_capacity(2 * n);
            data.extend(group.data().iter().map(|z| z.re));
            data.extend(group.data().iter().map(|z| z.im));
            DomainTensor::Real(Tensor::from_vec_unchecked(&dims, data))
        }
        SparsityType::AmPhase => {
            let mut dims = group.dims().to_vec();
            dims.push(2);
            let n = group.data().len();
            let mut data = Vec::with_capacity(2 * n);
            data.extend(group.data().iter().map(|z| z.norm()));
            data.extend(group.data().iter().map(|z| {
                if z.re == F::zero() && z.im == F::zero() {
                    F::zero()
                } else {
                    wrap_phase(z.arg())
                }
            }));
            DomainTensor::Real(Tensor::from_vec_unchecked(&dims, data))
        }
    }
}

/// Inverse of [`to_domain`]: reassembles the complex 3D group tensor.
/// For Type III, amplitudes driven negative by filtering are clamped to
/// zero (an amplitude is nonnegative by definition).
pub fn from_domain<F: Scalar>(t: &DomainTensor<F>, s: SparsityType) -> Result<Tensor<Complex<F>>>
where
    Complex<F>: Element<Real = F>,
{
    match (s, t) {
        (SparsityType::ComplexDomain, DomainTensor::Complex(c)) => Ok(c.clone()),
        (SparsityType::ReIm, DomainTensor::Real(r)) => {
            let dims = slab_dims(r)?;
            let n: usize = dims.iter().product();
            let (re, im) = r.data().split_at(n);
            let data = re
                .iter()
                .zip(im)
                .map(|(&a, &b)| Complex::new(a, b))
                .collect();
            Ok(Tensor::from_vec_unchecked(&dims, data))
        }
        (SparsityType::AmPhase, DomainTensor::Real(r)) => {
            let dims = slab_dims(r)?;
            let n: usize = dims.iter().product();
            let (am, ph) = r.data().split_at(n);
            let data = am
                .iter()
                .zip(ph)
                .map(|(&a, &p)| {
                    let a = a.max(F::zero());
                    Complex::new(a * p.cos(), a * p.sin())
                })
                .collect();
            Ok(Tensor::from_vec_unchecked(&dims, data))
        }
        _ => Err(CdidError::DimensionMismatch(
            "domain tensor variant does not match sparsity type".into(),
        )),
    }
}

/// Dimensions of one slab of a two-slab real 4D tensor.
fn slab_dims<F: Scalar>(t: &Tensor<F>) -> Result<Vec<usize>> {
    let dims = t.dims();
    if dims.len() != 4 || dims[3] != 2 {
        return Err(CdidError::DimensionMismatch(format!(
            "expected [N1, N2, J, 2] tensor, got {dims:?}"
        )));
    }
    Ok(dims[..3].to_vec())
}
