//! Phase wrapping and simple path-following unwrapping.


use crate::error::{CdidError, Result};
use crate::scalar::Scalar;

/// Wraps an angle onto the principal interval `[-pi, pi)`.
///
/// The interval is closed on the left: `wrap_phase(pi)` returns `-pi`.
pub fn wrap_phase<F: Scalar>(x: F) -> F {
    let pi = F::PI();
    let two_pi = pi + pi;
    let shifted = x + pi;
    let mut w = shifted - two_pi * (shifted / two_pi).floor() - pi;
    // Guard the half-open interval against floating-point round-off of the
    // floor expression at the boundaries.
    if w >= pi {
        w = w - two_pi;
    }
    if w < -pi {
        w = w + two_pi;
    }
    w
}

/// Wraps a phase increment onto `(-pi, pi]`, the convention used when
/// integrating increments during unwrapping (an exact half-turn steps
/// forward, not backward).
fn wrap_increment<F: Scalar>(d: F) -> F {
    let w = wrap_phase(d);
    if w == -F::PI() {
        F::PI()
    } else {
        w
    }
}

/// Unwraps a row-major wrapped phase plane by cumulative increments:
/// first down the leftmost column, then left-to-right along each row.
/// Exact for surfaces whose true neighbor differences stay below pi in
/// magnitude along that integration path.
pub fn unwrap_field<F: Scalar>(wrapped: &[F], height: usize, width: usize) -> Result<Vec<F>> {
    if wrapped.len() != height * width {
        return Err(CdidError::DimensionMismatch(format!(
            "phase plane {height}x{width} needs {} samples, got {}",
            height * width,
            wrapped.len()
        )));
    }
    let mut out = vec![F::zero(); wrapped.len()];
    if wrapped.is_empty() {
        return Ok(out);
    }
    out[0] = wrapped[0];
    for r in 1..height {
        let i = r * width;
        out[i] = out[i - width] + wrap_increment(wrapped[i] - wrapped[i - width]);
    }
    for r in 0..height {
        for c in 1..width {
            let i = r * width + c;
            out[i] = out[i - 1] + wrap_increment(wrapped[i] - wrapped[i - 1]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_hand_values() {
        assert_eq!(wrap_phase(0.0f64), 0.0);
        assert_eq!(wrap_phase(PI), -PI);
        assert_eq!(wrap_phase(-PI), -PI);
        assert!((wrap_phase(1.5 * PI) + 0.5 * PI).abs() < 1e-12);
        assert!((wrap_phase(-1.5 * PI) - 0.5 * PI).abs() < 1e-12);
        assert!(wrap_phase(2.0 * PI).abs() < 1e-12);
        assert!((wrap_phase(7.0 * PI + 0.25) - (-PI + 0.25)).abs() < 1e-9);
    }

    #[test]
    fn wrap_is_idempotent_and_in_range() {
        for k in -50..50 {
            let x = 0.13 * k as f64;
            let w = wrap_phase(x);
            assert!((-PI..PI).contains(&w), "wrap({x}) = {w} out of range");
            assert!((wrap_phase(w) - w).abs() < 1e-15);
            // The wrapped value differs from the input by a whole turn count.
            let turns = (x - w) / (2.0 * PI);
            assert!((turns - turns.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn unwrap_recovers_smooth_ramp() {
        // Absolute phase climbing to 10*pi across each row, zero at origin.
        let (h, w) = (4, 64);
        let truth: Vec<f64> = (0..h * w)
            .map(|i| 10.0 * PI * (i % w) as f64 / (w - 1) as f64)
            .collect();
        let wrapped: Vec<f64> = truth.iter().map(|&x| wrap_phase(x)).collect();
        let rec = unwrap_field(&wrapped, h, w).unwrap();
        for (a, b) in rec.iter().zip(&truth) {
            assert!((a - b).abs() < 1e-9, "unwrap mismatch: {a} vs {b}");
        }
    }

    #[test]
    fn unwrap_recovers_smooth_2d_surface() {
        // Separable bump, range far beyond one turn in both directions.
        let (h, w) = (32, 32);
        let mut truth = vec![0.0f64; h * w];
        for r in 0..h {
            for c in 0..w {
                let y = (r as f64 / (h - 1) as f64 - 0.5) * 2.0;
                let x = (c as f64 / (w - 1) as f64 - 0.5) * 2.0;
                truth[r * w + c] = 16.0 * PI * (-(x * x + y * y)).exp();
            }
        }
        // Anchor the origin inside the principal interval so the recovery
        // is exact rather than offset by whole turns.
        let anchor = truth[0];
        for t in &mut truth {
            *t -= anchor;
        }
        let wrapped: Vec<f64> = truth.iter().map(|&x| wrap_phase(x)).collect();
        let rec = unwrap_field(&wrapped, h, w).unwrap();
        for (i, (a, b)) in rec.iter().zip(&truth).enumerate() {
            assert!((a - b).abs() < 1e-9, "unwrap mismatch at {i}: {a} vs {b}");
        }
    }

    #[test]
    fn unwrap_rejects_bad_shape() {
        let err = unwrap_field(&[0.0f64; 5], 2, 3);
        assert!(err.is_err());
    }
}
