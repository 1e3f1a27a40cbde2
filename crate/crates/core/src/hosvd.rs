//! Higher-order SVD (Tucker form) of small dense tensors.
//!
//! A tensor is decomposed as a core multiplied along every mode by a square
//! unitary factor. Factors are the left singular vectors of the mode
//! unfoldings, computed through the Gram matrix of each unfolding and a
//! Hermitian eigendecomposition, which is the cheapest route at group sizes.
//! Because every factor is unitary, the transform conserves energy exactly
//! and the synthesis is the plain adjoint — the two properties the
//! shrinkage stages are built on.

use num_traits::Float;

use crate::error::Result;
use crate::linalg::{complete_orthonormal_columns, herm_eig};
use crate::scalar::{lit, Element};
use num_traits::Zero;
use crate::tensor::{Matrix, Tensor};

/// Result of [`hosvd`]: core spectrum plus one unitary factor per mode.
#[derive(Clone, Debug)]
pub struct HosvdFactors<E: Element> {
    /// Transform-domain spectrum, same dimensions as the input.
    pub core: Tensor<E>,
    /// Square unitary factor for each mode, in mode order.
    pub factors: Vec<Matrix<E>>,
}

/// Computes the factor of one mode: eigenvectors of the unfolding's Gram
/// matrix in order of decreasing eigenvalue, with numerically-null
/// directions replaced by a deterministic identity-seeded completion.
fn mode_factor<E: Element>(t: &Tensor<E>, mode: usize) -> Result<Matrix<E>> {
    let unfolding = t.unfold(mode)?;
    let eig = herm_eig(&unfolding.gram())?;
    let lambda_max = eig.values.first().copied().unwrap_or(E::Real::zero());
    // Eigenvalues of the Gram matrix carry an absolute round-off floor of
    // roughly eps times the largest one; directions at or below that floor
    // are noise, and their vectors are replaced by the completion rule so
    // degenerate inputs still produce a reproducible unitary factor.
    let max_dim = unfolding.rows().max(unfolding.cols());
    let cutoff = lambda_max * E::Real::epsilon() * lit::<E::Real>(max_dim as f64);
    let mut factor = eig.vectors;
    let filled = eig.values.iter().take_while(|&&v| v > cutoff).count();
    if filled < factor.cols() {
        complete_orthonormal_columns(&mut factor, filled);
    }
    Ok(factor)
}

/// Transforms a tensor into the basis spanned by the given factors:
/// multiplies each mode by the conjugate transpose of its factor.
pub fn analyze_in_basis<E: Element>(t: &Tensor<E>, factors: &[Matrix<E>]) -> Result<Tensor<E>> {
    debug_assert_eq!(factors.len(), t.order());
    let mut core = t.clone();
    for (mode, f) in factors.iter().enumerate() {
        core = core.mode_product(&f.herm_transpose(), mode)?;
    }
    Ok(core)
}

/// Full HOSVD of a tensor of order 2–4.
pub fn hosvd<E: Element>(t: &Tensor<E>) -> Result<HosvdFactors<E>> {
    let factors: Vec<Matrix<E>> = (0..t.order())
        .map(|mode| mode_factor(t, mode))
        .collect::<Result<_>>()?;
    let core = analyze_in_basis(t, &factors)?;
    Ok(HosvdFactors { core, factors })
}

/// Inverse of [`hosvd`]: multiplies the core by each factor along its mode.
pub fn hosvd_synthesis<E: Element>(f: &HosvdFactors<E>) -> Result<Tensor<E>> {
    synthesize_in_basis(&f.core, &f.factors)
}

/// Synthesis from an explicit core/factor pair (used when a spectrum is
/// shrunk in a basis borrowed from another tensor).
pub fn synthesize_in_basis<E: Element>(
    core: &Tensor<E>,
    factors: &[Matrix<E>],
) -> Result<Tensor<E>> {
    debug_assert_eq!(factors.len(), core.order());
    let mut t = core.clone();
    for (mode, f) in factors.iter().enumerate() {
        t = t.mode_product(f, mode)?;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{complex_svd, unitarity_defect};
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    type C64 = Complex<f64>;

    fn random_tensor(dims: &[usize], seed: u64) -> Tensor<C64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let n: usize = dims.iter().product();
        let data = (0..n)
            .map(|_| Complex::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
            .collect();
        Tensor::from_vec(dims, data).unwrap()
    }

    fn max_abs_diff(a: &Tensor<C64>, b: &Tensor<C64>) -> f64 {
        a.data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn round_trip_parseval_and_unitarity_across_orders() {
        for (dims, seed) in [
            (vec![5usize, 4], 11u64),
            (vec![4, 4, 9], 12),
            (vec![4, 4, 6, 2], 13),
        ] {
            let t = random_tensor(&dims, seed);
            let norm = t.frob_norm_sq().sqrt();
            let f = hosvd(&t).unwrap();
            for (k, factor) in f.factors.iter().enumerate() {
                assert_eq!(factor.rows(), dims[k]);
                assert!(
                    unitarity_defect(factor) < 1e-12,
                    "factor {k} of {dims:?} not unitary"
                );
            }
            let core_norm = f.core.frob_norm_sq().sqrt();
            assert!(
                (core_norm - norm).abs() <= 1e-12 * norm,
                "energy not conserved for {dims:?}"
            );
            let back = hosvd_synthesis(&f).unwrap();
            assert!(
                max_abs_diff(&back, &t) <= 1e-12 * norm,
                "round trip failed for {dims:?}"
            );
        }
    }

    #[test]
    fn zero_tensor_gives_zero_core_and_identity_factors() {
        let t: Tensor<C64> = Tensor::zeros(&[3, 4, 5]);
        let f = hosvd(&t).unwrap();
        assert!(f.core.data().iter().all(|x| x.norm() == 0.0));
        for (k, factor) in f.factors.iter().enumerate() {
            let n = factor.rows();
            let id: Matrix<C64> = Matrix::identity(n);
            assert_eq!(factor.data(), id.data(), "factor {k} is not the identity");
        }
    }

    #[test]
    fn factors_match_left_singular_vectors_of_unfoldings() {
        // Both routes pin column phases the same way, so for a spectrum with
        // distinct singular values the factors must agree entrywise.
        let t = random_tensor(&[4, 3, 2], 21);
        let f = hosvd(&t).unwrap();
        for mode in 0..3 {
            let svd = complex_svd(&t.unfold(mode).unwrap()).unwrap();
            let factor = &f.factors[mode];
            for c in 0..factor.cols() {
                for r in 0..factor.rows() {
                    let d = (factor.get(r, c) - svd.u.get(r, c)).norm();
                    assert!(
                        d < 1e-9,
                        "mode {mode} factor differs from SVD basis at ({r},{c}) by {d:e}"
                    );
                }
            }
        }
    }

    #[test]
    fn rank_deficient_slices_still_round_trip() {
        // Every slice along the last mode equal: the mode-2 unfolding has
        // rank 1, so most of that factor comes from the completion rule.
        let slice = random_tensor(&[4, 4, 1], 31);
        let mut data = Vec::new();
        for _ in 0..6 {
            data.extend_from_slice(slice.data());
        }
        let t = Tensor::from_vec(&[4, 4, 6], data).unwrap();
        let norm = t.frob_norm_sq().sqrt();
        let f = hosvd(&t).unwrap();
        assert!(unitarity_defect(&f.factors[2]) < 1e-12);
        let back = hosvd_synthesis(&f).unwrap();
        assert!(max_abs_diff(&back, &t) <= 1e-12 * norm);
    }

    #[test]
    fn analysis_in_borrowed_basis_is_adjoint_of_synthesis() {
        let t = random_tensor(&[4, 4, 5], 41);
        let basis = hosvd(&random_tensor(&[4, 4, 5], 42)).unwrap().factors;
        let core = analyze_in_basis(&t, &basis).unwrap();
        let back = synthesize_in_basis(&core, &basis).unwrap();
        assert!(max_abs_diff(&back, &t) <= 1e-12 * t.frob_norm_sq().sqrt());
        // Energy is conserved in any unitary basis, not just the tensor's own.
        let e = (core.frob_norm_sq().sqrt() - t.frob_norm_sq().sqrt()).abs();
        assert!(e <= 1e-12 * t.frob_norm_sq().sqrt());
    }
}
