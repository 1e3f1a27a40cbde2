//! Hermitian eigendecomposition and SVD via Jacobi rotations.
//!
//! All matrices that reach this module come from patch groups, so their
//! sides are small (at most a few dozen). Cyclic Jacobi is a good fit at
//! that scale: it is simple, numerically robust, and its factor matrices
//! are products of exact rotations, hence unitary to rotation round-off —
//! the property the transform-domain energy bookkeeping depends on.

use num_traits::{Float, One, Zero};

use crate::error::{CdidError, Result};
use crate::scalar::{lit, Element};
use crate::tensor::Matrix;

/// Hard cap on Jacobi sweeps. Convergence is quadratic once off-diagonal
/// mass is small and well-conditioned inputs finish in under ten sweeps,
/// so exhausting the cap signals a real problem and is reported as an
/// error instead of silently returning a half-converged factor.
const MAX_SWEEPS: usize = 64;

/// Plane rotation `J` acting on coordinates `(p, q)`:
/// `J[p][p] = c`, `J[p][q] = su`, `J[q][p] = -conj(su)`, `J[q][q] = c`,
/// with `c` real and `|su|² + c² = 1`, so `J` is exactly unitary.
struct Rotation<E: Element> {
    c: E::Real,
    su: E,
}

#[inline]
fn sign_or_one<F: Float>(x: F) -> F {
    if x < F::zero() {
        -F::one()
    } else {
        F::one()
    }
}

/// Rotation annihilating the off-diagonal entry `h` of the 2x2 Hermitian
/// block `[[app, h], [conj(h), aqq]]`. Requires `|h| > 0`.
fn rotation<E: Element>(app: E::Real, aqq: E::Real, h: E) -> Rotation<E> {
    let one = E::Real::one();
    let habs = h.modulus();
    let u = h.scale(habs.recip());
    let tau = (aqq - app) / (habs + habs);
    // Guard the tau^2 evaluation: for very lopsided blocks fall back to the
    // first-order tangent, which is accurate to machine precision there.
    let t = if tau.abs() > E::Real::epsilon().sqrt().recip() {
        (tau + tau).recip()
    } else {
        sign_or_one(tau) / (tau.abs() + (one + tau * tau).sqrt())
    };
    let c = (one + t * t).sqrt().recip();
    Rotation { c, su: u.scale(t * c) }
}

/// Applies `M <- M * J` on columns `p < q`.
fn apply_col_rotation<E: Element>(m: &mut Matrix<E>, p: usize, q: usize, rot: &Rotation<E>) {
    let r = m.rows();
    let (left, right) = m.data_mut().split_at_mut(q * r);
    let col_p = &mut left[p * r..p * r + r];
    let col_q = &mut right[..r];
    let su_conj = rot.su.conj();
    for (xp, xq) in col_p.iter_mut().zip(col_q.iter_mut()) {
        let a = *xp;
        let b = *xq;
        *xp = a.scale(rot.c) - b * su_conj;
        *xq = a * rot.su + b.scale(rot.c);
    }
}

/// Applies `M <- J^H * M` on rows `p < q`.
fn apply_row_rotation<E: Element>(m: &mut Matrix<E>, p: usize, q: usize, rot: &Rotation<E>) {
    let su_conj = rot.su.conj();
    for j in 0..m.cols() {
        let a = m.get(p, j);
        let b = m.get(q, j);
        m.set(p, j, a.scale(rot.c) - b * rot.su);
        m.set(q, j, a * su_conj + b.scale(rot.c));
    }
}

/// Multiplies a column in place by a unit-modulus factor so its
/// largest-magnitude entry becomes real and positive, and returns the
/// factor applied (`one` for an all-zero column). This pins the otherwise
/// arbitrary per-column phase, making factor matrices reproducible.
pub fn normalize_column_phase<E: Element>(col: &mut [E]) -> E {
    let mut best = 0usize;
    let mut best_mod = E::Real::zero();
    for (i, x) in col.iter().enumerate() {
        let m = x.modulus();
        if m > best_mod {
            best = i;
            best_mod = m;
        }
    }
    if best_mod == E::Real::zero() {
        return E::one();
    }
    let factor = col[best].conj().scale(best_mod.recip());
    for x in col.iter_mut() {
        *x = *x * factor;
    }
    factor
}

/// Maximum absolute entry of `M^H M - I`; zero for a perfectly unitary
/// (or column-orthonormal) matrix.
pub fn unitarity_defect<E: Element>(m: &Matrix<E>) -> E::Real {
    let mut worst = E::Real::zero();
    for i in 0..m.cols() {
        for j in 0..m.cols() {
            let mut dot = E::zero();
            for (&a, &b) in m.col(i).iter().zip(m.col(j)) {
                dot += a.conj() * b;
            }
            if i == j {
                dot -= E::one();
            }
            worst = worst.max(dot.modulus());
        }
    }
    worst
}

/// Extends the orthonormal columns `0..filled` of a square matrix to a
/// full unitary basis. Candidates are identity vectors, chosen greedily by
/// largest residual against the columns placed so far, then orthogonalized
/// by two Gram-Schmidt passes. Fully deterministic.
pub fn complete_orthonormal_columns<E: Element>(m: &mut Matrix<E>, filled: usize) {
    let n = m.rows();
    debug_assert_eq!(n, m.cols());
    for j in filled..n {
        // Residual energy of e_k against the current columns is
        // 1 - sum_i |m[k][i]|^2 because those columns are orthonormal.
        let mut best_k = 0usize;
        let mut best_res = -E::Real::one();
        for k in 0..n {
            let mut proj = E::Real::zero();
            for i in 0..j {
                proj += m.get(k, i).modulus_sq();
            }
            let res = E::Real::one() - proj;
            if res > best_res {
                best_res = res;
                best_k = k;
            }
        }
        let mut v = vec![E::zero(); n];
        v[best_k] = E::one();
        for _pass in 0..2 {
            for i in 0..j {
                let col = m.col(i);
                let mut coef = E::zero();
                for (&c, &x) in col.iter().zip(&v) {
                    coef += c.conj() * x;
                }
                for (x, &c) in v.iter_mut().zip(col) {
                    *x -= c * coef;
                }
            }
        }
        let norm = v.iter().map(|x| x.modulus_sq()).sum::<E::Real>().sqrt();
        for x in &mut v {
            *x = x.scale(norm.recip());
        }
        m.col_mut(j).copy_from_slice(&v);
    }
}

/// Eigendecomposition of a Hermitian (or real symmetric) matrix.
pub struct HermEig<E: Element> {
    /// Eigenvalues in nonincreasing order.
    pub values: Vec<E::Real>,
    /// Matching eigenvectors as columns; unitary, phase-normalized.
    pub vectors: Matrix<E>,
}

/// Cyclic Jacobi eigendecomposition. The input must be Hermitian; only the
/// value it actually stores is read (no symmetrizing), so a non-Hermitian
/// argument produces garbage rather than an error.
pub fn herm_eig<E: Element>(a: &Matrix<E>) -> Result<HermEig<E>> {
    let n = a.rows();
    if n != a.cols() {
        return Err(CdidError::DimensionMismatch(format!(
            "eigendecomposition of non-square {}x{} matrix",
            n,
            a.cols()
        )));
    }
    let mut w = a.clone();
    let mut v = Matrix::identity(n);
    let frob = w.frob_norm_sq().sqrt();
    let eps = E::Real::epsilon();
    let rotate_tol = frob * eps;
    let done_tol = frob * eps * lit::<E::Real>(n as f64);

    if frob > E::Real::zero() {
        let mut converged = false;
        for _sweep in 0..MAX_SWEEPS {
            let mut off_sq = E::Real::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off_sq += w.get(p, q).modulus_sq() + w.get(q, p).modulus_sq();
                }
            }
            if off_sq.sqrt() <= done_tol {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let h = w.get(p, q);
                    if h.modulus() <= rotate_tol {
                        continue;
                    }
                    let app = w.get(p, p).real_part();
                    let aqq = w.get(q, q).real_part();
                    let rot = rotation(app, aqq, h);
                    apply_col_rotation(&mut w, p, q, &rot);
                    apply_row_rotation(&mut w, p, q, &rot);
                    apply_col_rotation(&mut v, p, q, &rot);
                    // The rotation annihilates this pair exactly in exact
                    // arithmetic; write the exact zeros to stop round-off
                    // from re-seeding them.
                    w.set(p, q, E::zero());
                    w.set(q, p, E::zero());
                }
            }
        }
        if !converged {
            return Err(CdidError::NonConvergence {
                algorithm: "Hermitian Jacobi eigendecomposition",
                sweeps: MAX_SWEEPS,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<E::Real> = (0..n).map(|i| w.get(i, i).real_part()).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap().then(i.cmp(&j)));

    let mut vectors = Matrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (slot, &idx) in order.iter().enumerate() {
        values.push(diag[idx]);
        vectors.col_mut(slot).copy_from_slice(v.col(idx));
        normalize_column_phase(vectors.col_mut(slot));
    }
    Ok(HermEig { values, vectors })
}

/// Full singular value decomposition `m = U diag(s) V^H`.
pub struct Svd<E: Element> {
    /// Left singular vectors, square `rows x rows`, unitary.
    pub u: Matrix<E>,
    /// Singular values, length `min(rows, cols)`, nonnegative, nonincreasing.
    pub s: Vec<E::Real>,
    /// Right singular vectors, square `cols x cols`, unitary.
    pub v: Matrix<E>,
}

/// SVD of a complex (or real) dense matrix by one-sided Jacobi: rotations
/// orthogonalize the columns of the taller orientation while accumulating
/// `V`, then column norms give the singular values. Null directions of `U`
/// are completed from identity columns so `U` is always square unitary.
pub fn complex_svd<E: Element>(a: &Matrix<E>) -> Result<Svd<E>> {
    if a.rows() < a.cols() {
        // Work on the conjugate transpose and swap the roles of U and V;
        // the swap hands us an unpinned U, so re-pin before returning.
        let t = complex_svd(&a.herm_transpose())?;
        let mut out = Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        };
        pin_u_phases(&mut out);
        return Ok(out);
    }
    let n = a.rows();
    let m = a.cols();
    let mut b = a.clone();
    let mut v = Matrix::identity(m);
    let eps = E::Real::epsilon();

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..m {
            for q in (p + 1)..m {
                // 2x2 Gram block of columns p and q.
                let mut app = E::Real::zero();
                let mut aqq = E::Real::zero();
                let mut h = E::zero();
                for (&x, &y) in b.col(p).iter().zip(b.col(q)) {
                    app += x.modulus_sq();
                    aqq += y.modulus_sq();
                    h += x.conj() * y;
                }
                if h.modulus() <= eps * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let rot = rotation(app, aqq, h);
                apply_col_rotation(&mut b, p, q, &rot);
                apply_col_rotation(&mut v, p, q, &rot);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(CdidError::NonConvergence {
            algorithm: "one-sided Jacobi SVD",
            sweeps: MAX_SWEEPS,
        });
    }

    let norms: Vec<E::Real> = (0..m)
        .map(|j| b.col(j).iter().map(|x| x.modulus_sq()).sum::<E::Real>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap().then(i.cmp(&j)));

    let sigma_max = norms.iter().cloned().fold(E::Real::zero(), E::Real::max);
    // Below this, a column direction is numerically indistinguishable from
    // noise of the orthogonalization itself; treat it as a null direction.
    let cutoff = sigma_max * eps * lit::<E::Real>(n.max(m) as f64);

    let mut u = Matrix::zeros(n, n);
    let mut v_sorted = Matrix::zeros(m, m);
    let mut s = Vec::with_capacity(m);
    let mut filled = 0usize;
    for (slot, &idx) in order.iter().enumerate() {
        s.push(norms[idx]);
        v_sorted.col_mut(slot).copy_from_slice(v.col(idx));
        if norms[idx] > cutoff {
            let inv = norms[idx].recip();
            for (dst, &src) in u.col_mut(slot).iter_mut().zip(b.col(idx)) {
                *dst = src.scale(inv);
            }
            filled = slot + 1;
        }
    }
    complete_orthonormal_columns(&mut u, filled);

    let mut out = Svd { u, s, v: v_sorted };
    pin_u_phases(&mut out);
    Ok(out)
}

/// Pin per-column phases of `U` (largest-modulus entry real-positive) and
/// compensate the paired column of `V` so `U diag(s) V^H` is unchanged:
/// multiplying column `j` of both `U` and `V` by the same unit factor
/// cancels through the rectangular-diagonal middle term.
fn pin_u_phases<E: Element>(svd: &mut Svd<E>) {
    let paired = svd.u.cols().min(svd.v.cols());
    for j in 0..svd.u.cols() {
        let factor = normalize_column_phase(svd.u.col_mut(j));
        if j < paired {
            for x in svd.v.col_mut(j) {
                *x = *x * factor;
            }
        }
    }
}
