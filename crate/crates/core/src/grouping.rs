//! Patch extraction and nonlocal block matching.
//!
//! A group is built for each reference position: every in-bounds patch
//! whose upper-left corner lies in a square search window around the
//! reference competes by complex Euclidean distance, and the closest
//! `j_max` (the reference itself always first) are stacked into a 3D
//! tensor. Matching runs directly on field rows, with squared distances,
//! because this is the pipeline's single hottest loop.

use num_complex::Complex;

use crate::config::FilterConfig;
use crate::error::{CdidError, Result};
use crate::field::ComplexField;
use crate::scalar::{Element, Scalar};
use crate::tensor::{Matrix, Tensor};

/// One matched group of patches.
#[derive(Clone, Debug)]
pub struct PatchGroup<F: Scalar> {
    /// Complex `[n1, n2, j]` stack; slab `k` is the patch at `coords[k]`.
    pub patches: Tensor<Complex<F>>,
    /// Upper-left corners, reference first, then nondecreasing distance
    /// with raster order breaking ties.
    pub coords: Vec<(usize, usize)>,
    /// Index of the reference patch in `coords` (always 0 here; kept
    /// explicit so downstream code never hard-codes the convention).
    pub ref_index: usize,
}

/// Copies the `n1 x n2` patch with upper-left corner `(row, col)`.
pub fn extract_patch<F: Scalar>(
    f: &ComplexField<F>,
    row: usize,
    col: usize,
    n1: usize,
    n2: usize,
) -> Result<Matrix<Complex<F>>>
where
    Complex<F>: Element<Real = F>,
{
    if row + n1 > f.height() || col + n2 > f.width() {
        return Err(CdidError::DimensionMismatch(format!(
            "patch {n1}x{n2} at ({row},{col}) exceeds field {}x{}",
            f.height(),
            f.width()
        )));
    }
    let mut m = Matrix::zeros(n1, n2);
    for c in 0..n2 {
        for r in 0..n1 {
            m.set(r, c, f.get(row + r, col + c));
        }
    }
    Ok(m)
}

/// Euclidean distance between two equal-shape complex patches:
/// `sqrt(sum |p - q|^2)` with the complex modulus per element.
pub fn patch_distance<F: Scalar>(
    p: &Matrix<Complex<F>>,
    q: &Matrix<Complex<F>>,
) -> Result<F>
where
    Complex<F>: Element<Real = F>,
{
    if p.rows() != q.rows() || p.cols() != q.cols() {
        return Err(CdidError::DimensionMismatch(format!(
            "patch distance between {}x{} and {}x{}",
            p.rows(),
            p.cols(),
            q.rows(),
            q.cols()
        )));
    }
    let sum = p
        .data()
        .iter()
        .zip(q.data())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<F>();
    Ok(sum.sqrt())
}

/// Squared patch distance computed directly on field storage, avoiding
/// the per-candidate patch copies of the naive formulation.
#[inline]
fn patch_distance_sq_in_field<F: Scalar>(
    f: &ComplexField<F>,
    a: (usize, usize),
    b: (usize, usize),
    n1: usize,
    n2: usize,
) -> F {
    let mut sum = F::zero();
    for r in 0..n1 {
        let ra = &f.row(a.0 + r)[a.1..a.1 + n2];
        let rb = &f.row(b.0 + r)[b.1..b.1 + n2];
        for (x, y) in ra.iter().zip(rb) {
            let dre = x.re - y.re;
            let dim = x.im - y.im;
            sum += dre * dre + dim * dim;
        }
    }
    sum
}

/// Stacks the patches at `coords` into a complex `[n1, n2, j]` tensor.
/// Slab order follows `coords`; within a slab, storage matches the
/// column-major patch matrix.
pub fn gather_group<F: Scalar>(
    f: &ComplexField<F>,
    coords: &[(usize, usize)],
    n1: usize,
    n2: usize,
) -> Tensor<Complex<F>>
where
    Complex<F>: Element<Real = F>,
{
    let mut data = Vec::with_capacity(n1 * n2 * coords.len());
    for &(row, col) in coords {
        for c in 0..n2 {
            for r in 0..n1 {
                data.push(f.get(row + r, col + c));
            }
        }
    }
    Tensor::from_vec_unchecked(&[n1, n2, coords.len()], data)
}

/// Scatters a filtered `[n1, n2, j]` tensor back: calls `sink` once per
/// pixel of every patch with the pixel's field position and value.
pub fn scatter_group<F: Scalar>(
    patches: &Tensor<Complex<F>>,
    coords: &[(usize, usize)],
    mut sink: impl FnMut(usize, usize, Complex<F>),
) where
    Complex<F>: Element<Real = F>,
{
    let n1 = patches.dims()[0];
    let n2 = patches.dims()[1];
    let mut i = 0;
    for &(row, col) in coords {
        for c in 0..n2 {
            for r in 0..n1 {
                sink(row + r, col + c, patches.data()[i]);
                i += 1;
            }
        }
    }
}

/// Finds the group for one reference position on `f` per the config:
/// candidates are all in-bounds corners in the `search_window` square
/// centered on the reference; the `j_max` closest are kept, the reference
/// forced first and remaining ties broken by raster order.
pub fn match_group<F: Scalar>(
    f: &ComplexField<F>,
    ref_row: usize,
    ref_col: usize,
    cfg: &FilterConfig<F>,
) -> Result<PatchGroup<F>>
where
    Complex<F>: Element<Real = F>,
{
    let (n1, n2) = (cfg.n1, cfg.n2);
    if ref_row + n1 > f.height() || ref_col + n2 > f.width() {
        return Err(CdidError::DimensionMismatch(format!(
            "reference patch at ({ref_row},{ref_col}) exceeds field {}x{}",
            f.height(),
            f.width()
        )));
    }
    let half = cfg.search_window / 2;
    let row_lo = ref_row.saturating_sub(half);
    let row_hi = (ref_row + half).min(f.height() - n1);
    let col_lo = ref_col.saturating_sub(half);
    let col_hi = (ref_col + half).min(f.width() - n2);

    let mut candidates: Vec<(F, usize, usize)> = Vec::new();
    for row in row_lo..=row_hi {
        for col in col_lo..=col_hi {
            if (row, col) == (ref_row, ref_col) {
                continue;
            }
            let d = patch_distance_sq_in_field(f, (ref_row, ref_col), (row, col), n1, n2);
            candidates.push((d, row, col));
        }
    }

    let keep = candidates.len().min(cfg.j_max.saturating_sub(1));
    let by_distance_then_raster = |a: &(F, usize, usize), b: &(F, usize, usize)| {
        a.0.partial_cmp(&b.0)
            .expect("finite distances")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    };
    if keep > 0 && keep < candidates.len() {
        candidates.select_nth_unstable_by(keep - 1, by_distance_then_raster);
    }
    candidates.truncate(keep);
    candidates.sort_by(by_distance_then_raster);

    let mut coords = Vec::with_capacity(keep + 1);
    coords.push((ref_row, ref_col));
    coords.extend(candidates.iter().map(|&(_, r, c)| (r, c)));

    Ok(PatchGroup {
        patches: gather_group(f, &coords, n1, n2),
        coords,
        ref_index: 0,
    })
}

/// Reference corners covering the whole field: a raster scan with the
/// configured stride along each axis, with the last valid offset always
/// appended so border pixels are processed too.
pub fn reference_positions<F: Scalar>(
    height: usize,
    width: usize,
    cfg: &FilterConfig<F>,
) -> Vec<(usize, usize)> {
    let rows = reference_axis(height, cfg.n1, cfg.step);
    let cols = reference_axis(width, cfg.n2, cfg.step);
    let mut out = Vec::with_capacity(rows.len() * cols.len());
    for &r in &rows {
        for &c in &cols {
            out.push((r, c));
        }
    }
    out
}

/// Reference offsets along one axis: every multiple of `step` strictly
/// below the last valid corner, then the last corner itself.
pub fn reference_axis(size: usize, patch: usize, step: usize) -> Vec<usize> {
    let last = size - patch;
    let mut v: Vec<usize> = (0..)
        .map(|k| k * step)
        .take_while(|&p| p < last)
        .collect();
    v.push(last);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_field(h: usize, w: usize) -> ComplexField<f64> {
        let data = (0..h * w)
            .map(|i| Complex::new((i / w) as f64, (i % w) as f64))
            .collect();
        ComplexField::new(h, w, data).unwrap()
    }

    #[test]
    fn extract_patch_of_ramp_field() {
        let f = ramp_field(12, 12);
        let p = extract_patch(&f, 2, 3, 4, 4).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(p.get(r, c), Complex::new((r + 2) as f64, (c + 3) as f64));
            }
        }
        assert!(extract_patch(&f, 9, 9, 4, 4).is_err(), "out of bounds");
    }

    #[test]
    fn extract_whole_field_as_single_patch() {
        let f = ramp_field(8, 8);
        let p = extract_patch(&f, 0, 0, 8, 8).unwrap();
        assert_eq!(p.get(7, 7), f.get(7, 7));
    }

    #[test]
    fn patch_distance_uses_complex_modulus() {
        let zero = Matrix::zeros(8, 8);
        let ones = Matrix::from_vec(8, 8, vec![Complex::new(1.0f64, 0.0); 64]).unwrap();
        let imag = Matrix::from_vec(8, 8, vec![Complex::new(0.0f64, 1.0); 64]).unwrap();
        assert_eq!(patch_distance(&zero, &zero).unwrap(), 0.0);
        assert!((patch_distance(&zero, &ones).unwrap() - 8.0).abs() < 1e-12);
        // |j| = 1, so an all-imaginary offset gives the same distance.
        assert!((patch_distance(&zero, &imag).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn in_field_distance_matches_extracted_patch_distance() {
        let f = ramp_field(16, 16);
        let p = extract_patch(&f, 1, 2, 4, 4).unwrap();
        let q = extract_patch(&f, 6, 9, 4, 4).unwrap();
        let direct = patch_distance(&p, &q).unwrap();
        let fast = patch_distance_sq_in_field(&f, (1, 2), (6, 9), 4, 4).sqrt();
        assert!((direct - fast).abs() < 1e-12);
    }

    #[test]
    fn reference_positions_cover_borders() {
        let cfg = FilterConfig::<f64>::default();
        let pos = reference_positions(16, 16, &cfg);
        let rows: Vec<usize> = pos.iter().map(|p| p.0).collect();
        assert_eq!(&rows[..4], &[0, 0, 0, 0]);
        let unique_rows: Vec<usize> = {
            let mut v = rows.clone();
            v.dedup();
            v
        };
        assert_eq!(unique_rows, vec![0, 3, 6, 8], "8 forced as last offset");

        let single = reference_positions(8, 8, &cfg);
        assert_eq!(single, vec![(0, 0)], "field equal to patch size");
    }

    #[test]
    fn reference_positions_step_one_is_every_offset() {
        let cfg = FilterConfig::<f64> {
            step: 1,
            ..FilterConfig::default()
        };
        let pos = reference_positions(12, 10, &cfg);
        assert_eq!(pos.len(), (12 - 8 + 1) * (10 - 8 + 1));
    }

    #[test]
    fn constant_field_groups_are_full_and_raster_ordered() {
        let f = ComplexField::new(20, 20, vec![Complex::new(2.0f64, -1.0); 400]).unwrap();
        let cfg = FilterConfig::<f64> {
            j_max: 5,
            ..FilterConfig::default()
        };
        let g = match_group(&f, 6, 6, &cfg).unwrap();
        assert_eq!(g.coords.len(), 5);
        assert_eq!(g.ref_index, 0);
        assert_eq!(g.coords[0], (6, 6), "reference first");
        // All distances are zero, so the rest follow raster order from the
        // window's top-left corner.
        assert_eq!(&g.coords[1..], &[(0, 0), (0, 1), (0, 2), (0, 3)]);
        assert!(g.patches.data().iter().all(|&z| z == Complex::new(2.0, -1.0)));
    }

    #[test]
    fn matching_ranks_by_distance_against_brute_force() {
        // A field with one near-duplicate of the reference: that patch must
        // be ranked directly after the reference.
        let mut f = ramp_field(24, 24);
        let cfg = FilterConfig::<f64> {
            n1: 4,
            n2: 4,
            j_max: 3,
            search_window: 15,
            ..FilterConfig::default()
        };
        // Plant a near-copy of the (10,10) patch at (4,12).
        for r in 0..4 {
            for c in 0..4 {
                let mut v = f.get(10 + r, 10 + c);
                v.re += 0.001;
                f.set(4 + r, 12 + c, v);
            }
        }
        let g = match_group(&f, 10, 10, &cfg).unwrap();
        assert_eq!(g.coords[0], (10, 10));
        assert_eq!(g.coords[1], (4, 12), "planted near-duplicate ranks first");

        // Brute-force oracle for the third member.
        let refp = extract_patch(&f, 10, 10, 4, 4).unwrap();
        let mut best: Option<(f64, usize, usize)> = None;
        for row in 3..=17usize {
            for col in 3..=17usize {
                if (row, col) == (10, 10) || (row, col) == (4, 12) {
                    continue;
                }
                let d = patch_distance(&refp, &extract_patch(&f, row, col, 4, 4).unwrap()).unwrap();
                let cand = (d, row, col);
                if best.map_or(true, |b| (cand.0, cand.1, cand.2) < b) {
                    best = Some(cand);
                }
            }
        }
        let b = best.unwrap();
        assert_eq!(g.coords[2], (b.1, b.2), "third member disagrees with brute force");
    }

    #[test]
    fn j_max_one_keeps_reference_alone() {
        let f = ramp_field(16, 16);
        let cfg = FilterConfig::<f64> {
            j_max: 1,
            ..FilterConfig::default()
        };
        let g = match_group(&f, 3, 3, &cfg).unwrap();
        assert_eq!(g.coords, vec![(3, 3)]);
        assert_eq!(g.patches.dims(), &[8, 8, 1]);
    }

    #[test]
    fn window_is_clipped_at_borders() {
        let f = ramp_field(16, 16);
        let cfg = FilterConfig::<f64> {
            j_max: 1000,
            search_window: 7,
            ..FilterConfig::default()
        };
        // Reference at the top-left corner: only offsets 0..=3 exist on
        // each axis (3 = half window), so 16 candidates total.
        let g = match_group(&f, 0, 0, &cfg).unwrap();
        assert_eq!(g.coords.len(), 16);
        assert!(g.coords.iter().all(|&(r, c)| r <= 3 && c <= 3));
    }

    #[test]
    fn every_pixel_is_covered_by_some_group_patch() {
        let f = ramp_field(19, 17);
        let cfg = FilterConfig::<f64>::default();
        let mut mask = vec![false; 19 * 17];
        for (r0, c0) in reference_positions(19, 17, &cfg) {
            let g = match_group(&f, r0, c0, &cfg).unwrap();
            scatter_group(&g.patches, &g.coords, |r, c, _| {
                mask[r * 17 + c] = true;
            });
        }
        assert!(mask.iter().all(|&m| m), "uncovered pixels remain");
    }

    #[test]
    fn gather_scatter_round_trip() {
        let f = ramp_field(12, 12);
        let coords = vec![(0usize, 0usize), (5, 3), (4, 4)];
        let t = gather_group(&f, &coords, 4, 4);
        let mut seen = 0usize;
        scatter_group(&t, &coords, |r, c, v| {
            assert_eq!(v, f.get(r, c));
            seen += 1;
        });
        assert_eq!(seen, 3 * 16);
    }
}
