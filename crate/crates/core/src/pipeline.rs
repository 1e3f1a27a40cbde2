//! The collaborative filters: the thresholding stage, the Wiener stage,
//! the iterative refinement wrapper, and the name-based dispatcher.
//!
//! Each filter walks the reference positions, gathers a group of similar
//! patches, filters the group's spectrum in its sparsity domain, and blends
//! the filtered patches back by weighted overlap-add. Groups are processed
//! in parallel by reference row; every worker accumulates into a private
//! band buffer and the bands are merged in row order afterwards, so the
//! output is bitwise identical for any worker count.

use num_complex::Complex;
use rayon::prelude::*;

use crate::config::{FilterConfig, IterDeltaMode};
use crate::error::{CdidError, Result};
use crate::field::ComplexField;
use crate::grouping::{gather_group, match_group, reference_axis, scatter_group};
use crate::hosvd::{analyze_in_basis, hosvd, hosvd_synthesis, synthesize_in_basis};
use crate::scalar::{Element, Scalar};
use crate::shrinkage::{
    hard_threshold, soft_threshold, universal_threshold, wiener_attenuate, ThresholdMode,
    ThresholdSpec,
};
use crate::sparsity::{from_domain, to_domain, DomainTensor, SparsityType};
use crate::tensor::Tensor;

/// The nine runnable algorithm names: sparsity family × stage plan.
pub const ALGORITHM_NAMES: [&str; 9] = [
    "cd-ht", "cd-wi", "cd-it", "imre-ht", "imre-wi", "imre-it", "pham-ht", "pham-wi", "pham-it",
];

/// Weighted overlap-add accumulator covering field rows
/// `[row_offset, row_offset + rows)`. A full-field buffer is the special
/// case `row_offset = 0, rows = height`.
pub struct AggregationBuffers<F: Scalar> {
    row_offset: usize,
    rows: usize,
    width: usize,
    numerator: Vec<Complex<F>>,
    denominator: Vec<F>,
}

impl<F: Scalar> AggregationBuffers<F>
where
    Complex<F>: Element<Real = F>,
{
    pub fn new(rows: usize, width: usize) -> Self {
        Self::band(0, rows, width)
    }

    pub fn band(row_offset: usize, rows: usize, width: usize) -> Self {
        AggregationBuffers {
            row_offset,
            rows,
            width,
            numerator: vec![Complex::new(F::zero(), F::zero()); rows * width],
            denominator: vec![F::zero(); rows * width],
        }
    }

    /// Adds one weighted pixel estimate. `row` is in field coordinates.
    pub fn add(&mut self, row: usize, col: usize, value: Complex<F>, weight: F) {
        debug_assert!(row >= self.row_offset && row < self.row_offset + self.rows);
        let i = (row - self.row_offset) * self.width + col;
        self.numerator[i] += value.scale(weight);
        self.denominator[i] += weight;
    }

    /// Adds a whole band into this buffer. The caller fixes the merge
    /// order; this method only requires the band to fit.
    pub fn merge(&mut self, band: &AggregationBuffers<F>) {
        assert!(
            band.width == self.width
                && band.row_offset >= self.row_offset
                && band.row_offset + band.rows <= self.row_offset + self.rows,
            "band does not fit the receiving buffer"
        );
        let shift = (band.row_offset - self.row_offset) * self.width;
        for (i, (n, d)) in band.numerator.iter().zip(&band.denominator).enumerate() {
            self.numerator[shift + i] += *n;
            self.denominator[shift + i] += *d;
        }
    }

    /// Divides through: every pixel becomes the convex combination of the
    /// estimates that covered it. A zero-weight pixel means the stride left
    /// part of the field uncovered, which is a configuration error.
    pub fn finish(self) -> Result<ComplexField<F>> {
        let mut out = Vec::with_capacity(self.numerator.len());
        for (i, (n, d)) in self.numerator.iter().zip(&self.denominator).enumerate() {
            if !(*d > F::zero()) {
                return Err(CdidError::InvalidConfig(format!(
                    "pixel ({}, {}) received no patch estimate; stride exceeds patch size",
                    self.row_offset + i / self.width,
                    i % self.width
                )));
            }
            out.push(Complex::new(n.re / *d, n.im / *d));
        }
        ComplexField::new(self.rows, self.width, out)
    }
}

/// How the spectrum threshold for one pass is derived.
#[derive(Clone, Copy)]
enum ThresholdRule<F> {
    /// `δ = eta · σ · sqrt(2 ln(N1·N2·J))` with the given multiplier.
    UniversalEta(F),
    /// `δ` given directly in spectrum units.
    Absolute(F),
}

impl<F: Scalar> ThresholdRule<F> {
    fn delta(&self, sigma: F, group_card: usize, mode: ThresholdMode) -> F {
        match *self {
            ThresholdRule::UniversalEta(eta) => universal_threshold(&ThresholdSpec {
                eta,
                sigma,
                mode,
                group_card,
            }),
            ThresholdRule::Absolute(d) => d,
        }
    }
}

/// HOSVD analysis, core thresholding, synthesis. Returns the filtered
/// group and the retained-coefficient count that sets its weight.
fn threshold_spectrum<E: Element>(
    group: &Tensor<E>,
    delta: E::Real,
    mode: ThresholdMode,
) -> Result<(Tensor<E>, usize)> {
    let mut f = hosvd(group)?;
    let retained = match mode {
        ThresholdMode::Hard => hard_threshold(&mut f.core, delta),
        ThresholdMode::Soft => soft_threshold(&mut f.core, delta),
    };
    Ok((hosvd_synthesis(&f)?, retained))
}

/// Wiener filtering of a noisy group in the basis derived from its pilot
/// group: the pilot's own spectrum supplies the attenuation weights.
/// Returns the filtered group and the attenuation energy `Σw²`.
fn wiener_spectrum<E: Element>(
    noisy: &Tensor<E>,
    pilot: &Tensor<E>,
    sigma: E::Real,
) -> Result<(Tensor<E>, E::Real)> {
    let basis = hosvd(pilot)?;
    let mut core = analyze_in_basis(noisy, &basis.factors)?;
    let energy = wiener_attenuate(&mut core, &basis.core, sigma)?;
    Ok((synthesize_in_basis(&core, &basis.factors)?, energy))
}

/// Per-real-slab noise std for the Wiener weights: Types II/III spread the
/// complex noise variance evenly over two real slabs; Type I keeps σ.
fn wiener_sigma<F: Scalar>(sparsity: SparsityType, sigma: F) -> F {
    match sparsity {
        SparsityType::ComplexDomain => sigma,
        SparsityType::ReIm | SparsityType::AmPhase => sigma / F::SQRT_2(),
    }
}

/// Filters one group for the thresholding stage. Returns the patch
/// estimates, their coordinates, and the group aggregation weight.
fn ht_filter_group<F: Scalar>(
    field: &ComplexField<F>,
    ref_row: usize,
    ref_col: usize,
    cfg: &FilterConfig<F>,
    rule: ThresholdRule<F>,
) -> Result<(Tensor<Complex<F>>, Vec<(usize, usize)>, F)>
where
    Complex<F>: Element<Real = F>,
{
    let group = match_group(field, ref_row, ref_col, cfg)?;
    let card = cfg.n1 * cfg.n2 * group.coords.len();
    let delta = rule.delta(cfg.sigma, card, cfg.threshold_mode);
    let (estimate, retained) = match to_domain(&group.patches, cfg.sparsity) {
        DomainTensor::Complex(t) => {
            let (filtered, retained) = threshold_spectrum(&t, delta, cfg.threshold_mode)?;
            (
                from_domain(&DomainTensor::Complex(filtered), cfg.sparsity)?,
                retained,
            )
        }
        DomainTensor::Real(t) => {
            let (filtered, retained) = threshold_spectrum(&t, delta, cfg.threshold_mode)?;
            (
                from_domain(&DomainTensor::Real(filtered), cfg.sparsity)?,
                retained,
            )
        }
    };
    let weight = F::one() / (F::one() + F::lit(retained as f64));
    Ok((estimate, group.coords, weight))
}

/// Filters one group for the Wiener stage: matching and the basis come
/// from the pilot, the attenuated spectrum from the noisy observation.
fn wiener_filter_group<F: Scalar>(
    noisy: &ComplexField<F>,
    pilot: &ComplexField<F>,
    ref_row: usize,
    ref_col: usize,
    cfg: &FilterConfig<F>,
) -> Result<(Tensor<Complex<F>>, Vec<(usize, usize)>, F)>
where
    Complex<F>: Element<Real = F>,
{
    let group = match_group(pilot, ref_row, ref_col, cfg)?;
    let noisy_patches = gather_group(noisy, &group.coords, cfg.n1, cfg.n2);
    let sigma = wiener_sigma(cfg.sparsity, cfg.sigma);
    let (estimate, energy) = match (
        to_domain(&group.patches, cfg.sparsity),
        to_domain(&noisy_patches, cfg.sparsity),
    ) {
        (DomainTensor::Complex(p), DomainTensor::Complex(n)) => {
            let (filtered, e) = wiener_spectrum(&n, &p, sigma)?;
            (from_domain(&DomainTensor::Complex(filtered), cfg.sparsity)?, e)
        }
        (DomainTensor::Real(p), DomainTensor::Real(n)) => {
            let (filtered, e) = wiener_spectrum(&n, &p, sigma)?;
            (from_domain(&DomainTensor::Real(filtered), cfg.sparsity)?, e)
        }
        _ => unreachable!("one sparsity type maps to one domain variant"),
    };
    let weight = F::one() / energy.max(F::lit(1e-12));
    Ok((estimate, group.coords, weight))
}

/// Runs `process` over every reference position and aggregates the patch
/// estimates. Parallel over reference rows; bands merge in row order so
/// the result does not depend on the worker count.
fn aggregate_filter<F, P>(
    height: usize,
    width: usize,
    cfg: &FilterConfig<F>,
    process: P,
) -> Result<ComplexField<F>>
where
    F: Scalar,
    Complex<F>: Element<Real = F>,
    P: Fn(usize, usize) -> Result<(Tensor<Complex<F>>, Vec<(usize, usize)>, F)> + Sync,
{
    if height < cfg.n1 || width < cfg.n2 {
        return Err(CdidError::DimensionMismatch(format!(
            "{height}x{width} field is smaller than the {}x{} patch",
            cfg.n1, cfg.n2
        )));
    }
    let ref_rows = reference_axis(height, cfg.n1, cfg.step);
    let ref_cols = reference_axis(width, cfg.n2, cfg.step);
    let half = cfg.search_window / 2;

    let bands: Vec<Result<AggregationBuffers<F>>> = ref_rows
        .par_iter()
        .map(|&r| {
            // Every patch of every group for this reference row starts
            // within `half` rows of `r`, so this band bounds all writes.
            let band_lo = r.saturating_sub(half);
            let band_hi = (r + half + cfg.n1).min(height);
            let mut acc = AggregationBuffers::band(band_lo, band_hi - band_lo, width);
            for &c in &ref_cols {
                let (estimates, coords, weight) = process(r, c)?;
                scatter_group(&estimates, &coords, |row, col, v| {
                    acc.add(row, col, v, weight);
                });
            }
            Ok(acc)
        })
        .collect();

    let mut total = AggregationBuffers::new(height, width);
    for band in bands {
        total.merge(&band?);
    }
    total.finish()
}

/// The thresholding-stage collaborative filter.
pub fn cdf_ht<F: Scalar>(input: &ComplexField<F>, cfg: &FilterConfig<F>) -> Result<ComplexField<F>>
where
    Complex<F>: Element<Real = F>,
{
    cfg.validate()?;
    cdf_ht_with_rule(input, cfg, ThresholdRule::UniversalEta(cfg.eta))
}

fn cdf_ht_with_rule<F: Scalar>(
    input: &ComplexField<F>,
    cfg: &FilterConfig<F>,
    rule: ThresholdRule<F>,
) -> Result<ComplexField<F>>
where
    Complex<F>: Element<Real = F>,
{
    aggregate_filter(input.height(), input.width(), cfg, |r, c| {
        ht_filter_group(input, r, c, cfg, rule)
    })
}

/// The Wiener-stage collaborative filter refining a stage-1 pilot.
pub fn cdf_wiener<F: Scalar>(
    noisy: &ComplexField<F>,
    pilot: &ComplexField<F>,
    cfg: &FilterConfig<F>,
) -> Result<ComplexField<F>>
where
    Complex<F>: Element<Real = F>,
{
    cfg.validate()?;
    if noisy.height() != pilot.height() || noisy.width() != pilot.width() {
        return Err(CdidError::DimensionMismatch(format!(
            "noisy field is {}x{} but pilot is {}x{}",
            noisy.height(),
            noisy.width(),
            pilot.height(),
            pilot.width()
        )));
    }
    aggregate_filter(noisy.height(), noisy.width(), cfg, |r, c| {
        wiener_filter_group(noisy, pilot, r, c, cfg)
    })
}

/// Instrumentation record of one iterative run.
#[derive(Clone, Debug)]
pub struct IterTrace<F: Scalar> {
    /// The blended input of the first pass. The recursion starts at
    /// `u⁰ = z`, so this is always the observation itself.
    pub v_first: ComplexField<F>,
    /// Per-pass blending factors, in execution order.
    pub alphas: Vec<F>,
    /// Per-pass threshold parameters, in the configured units.
    pub deltas: Vec<F>,
    /// Number of filter passes executed.
    pub passes: usize,
}

/// Iterative refinement with instrumentation: pass `t` blends
/// `v = u + α_t(z − u)` and re-filters with the schedule's `δ_t`.
pub fn cdf_iterative_with_trace<F: Scalar>(
    z: &ComplexField<F>,
    cfg: &FilterConfig<F>,
) -> Result<(ComplexField<F>, IterTrace<F>)>
where
    Complex<F>: Element<Real = F>,
{
    cfg.validate()?;
    let schedule = cfg.effective_iter_schedule();
    let mut trace = IterTrace {
        v_first: z.clone(),
        alphas: Vec::with_capacity(schedule.len()),
        deltas: Vec::with_capacity(schedule.len()),
        passes: 0,
    };
    let mut u = z.clone();
    for (t, &(alpha, delta)) in schedule.iter().enumerate() {
        // v = u + α(z − u). The first pass starts from u = z, which makes
        // the blend collapse to z itself regardless of α.
        let v = if t == 0 {
            z.clone()
        } else {
            let blended: Vec<Complex<F>> = u
                .data()
                .iter()
                .zip(z.data())
                .map(|(&ui, &zi)| ui + (zi - ui).scale(alpha))
                .collect();
            ComplexField::new(z.height(), z.width(), blended)?
        };
        let rule = match cfg.iter_delta_mode {
            IterDeltaMode::EtaMultiplier => ThresholdRule::UniversalEta(delta),
            IterDeltaMode::Absolute => ThresholdRule::Absolute(delta),
        };
        u = cdf_ht_with_rule(&v, cfg, rule)?;
        trace.alphas.push(alpha);
        trace.deltas.push(delta);
        trace.passes += 1;
    }
    Ok((u, trace))
}

/// Iterative refinement over the configured (or default three-step)
/// schedule.
pub fn cdf_iterative<F: Scalar>(
    z: &ComplexField<F>,
    cfg: &FilterConfig<F>,
) -> Result<ComplexField<F>>
where
    Complex<F>: Element<Real = F>,
{
    cdf_iterative_with_trace(z, cfg).map(|(u, _)| u)
}

/// Runs one of the nine named algorithms: the name prefix selects the
/// sparsity domain (`cd` complex, `imre` real/imaginary, `pham`
/// amplitude/phase) and the suffix the stage plan (`ht` thresholding,
/// `wi` thresholding + Wiener, `it` iterative).
pub fn run_named_algorithm<F: Scalar>(
    z: &ComplexField<F>,
    name: &str,
    cfg: &FilterConfig<F>,
) -> Result<ComplexField<F>>
where
    Complex<F>: Element<Real = F>,
{
    let unknown = || CdidError::UnknownAlgorithm(name.to_string());
    let (family, stage) = name.split_once('-').ok_or_else(unknown)?;
    let mut cfg = cfg.clone();
    cfg.sparsity = match family {
        "cd" => SparsityType::ComplexDomain,
        "imre" => SparsityType::ReIm,
        "pham" => SparsityType::AmPhase,
        _ => return Err(unknown()),
    };
    match stage {
        "ht" => {
            cfg.wiener = false;
            cdf_ht(z, &cfg)
        }
        "wi" => {
            cfg.wiener = true;
            let pilot = cdf_ht(z, &cfg)?;
            cdf_wiener(z, &pilot, &cfg)
        }
        "it" => {
            cfg.wiener = false;
            cdf_iterative(z, &cfg)
        }
        _ => Err(unknown()),
    }
}
