//! Monte-Carlo benchmarking: grids of scene × noise level × algorithm ×
//! run, with the per-run results table, run-mean aggregates, and box-plot
//! assembly.
//!
//! Within one (scene, level, run) cell the noisy observation is generated
//! once and shared by every algorithm, so algorithms are compared on the
//! same data. Cells execute in parallel; the row order of the results is
//! fixed by the plan regardless of thread count, because each run's RNG
//! stream depends only on (seed, run index).

use std::collections::HashMap;
use std::io::{Read, Write};
use std::time::Instant;

use num_complex::Complex;
use rayon::prelude::*;

use crate::config::FilterConfig;
use crate::error::{CdidError, Result};
use crate::metrics::{evaluate_estimate, MetricKind, MetricReport};
use crate::noise::{make_noisy, noise_sigma, NoiseSpec};
use crate::pipeline::{run_named_algorithm, ALGORITHM_NAMES};
use crate::scalar::{Element, Scalar};
use crate::scene::TestScene;
use crate::stats::{BoxplotSummary, MetricCell};

/// The noise levels a benchmark exercises when none are given.
pub const DEFAULT_SIGMA_LIST: [f64; 6] = [0.05, 0.1, 0.2, 0.3, 0.5, 0.9];

/// Pseudo-algorithm name for the unfiltered observation; its rows measure
/// the noise floor every real algorithm is compared against.
pub const NOISY_BASELINE: &str = "noisy";

/// Header of the per-run results table.
pub const CSV_COLUMNS: [&str; 12] = [
    "image",
    "sigma_phi",
    "algorithm",
    "run",
    "psnr_phi",
    "psnr_ampl",
    "rmse_phi_abs",
    "rmse_a",
    "snr_c",
    "snr_phi_abs",
    "wall_clock_s",
    "manifest_hash",
];

/// One per-run measurement of one algorithm on one noisy observation.
#[derive(Clone, Debug)]
pub struct BenchRow<F: Scalar> {
    pub image: String,
    pub sigma_phi: F,
    pub algorithm: String,
    pub run: usize,
    pub report: MetricReport<F>,
    /// Seconds spent inside the algorithm call; 0 for the noisy baseline.
    pub wall_clock_s: f64,
}

/// Run-mean of every criterion over one (image, level, algorithm) cell.
#[derive(Clone, Debug)]
pub struct AggregateRow<F: Scalar> {
    pub image: String,
    pub sigma_phi: F,
    pub algorithm: String,
    pub runs: usize,
    pub mean: MetricReport<F>,
}

/// A full benchmark grid over prebuilt scenes.
#[derive(Clone, Debug)]
pub struct BenchPlan<'a, F: Scalar> {
    pub scenes: &'a [TestScene<F>],
    pub sigmas: &'a [F],
    /// Algorithm names (see [`ALGORITHM_NAMES`]), plus optionally
    /// [`NOISY_BASELINE`].
    pub algorithms: &'a [String],
    pub runs: usize,
    pub seed: u64,
    /// Template configuration; `sigma` is overwritten per cell from the
    /// noise model, everything else is used as given.
    pub base: FilterConfig<F>,
}

impl<F: Scalar> BenchPlan<'_, F> {
    fn validate(&self) -> Result<()> {
        if self.scenes.is_empty() || self.sigmas.is_empty() || self.algorithms.is_empty() {
            return Err(CdidError::InvalidConfig(
                "benchmark needs at least one scene, one noise level, and one algorithm".into(),
            ));
        }
        if self.runs == 0 {
            return Err(CdidError::InvalidConfig("benchmark needs runs >= 1".into()));
        }
        // Reject unknown names before hours of compute, not during them.
        for name in self.algorithms {
            if name != NOISY_BASELINE && !ALGORITHM_NAMES.contains(&name.as_str()) {
                return Err(CdidError::UnknownAlgorithm(name.clone()));
            }
        }
        self.base.validate()
    }
}

/// Executes the full grid and returns one row per (scene, level, run,
/// algorithm), in that nesting order.
pub fn run_benchmark<F: Scalar>(plan: &BenchPlan<F>) -> Result<Vec<BenchRow<F>>>
where
    Complex<F>: Element<Real = F>,
{
    plan.validate()?;
    let mut cells = Vec::new();
    for (si, _) in plan.scenes.iter().enumerate() {
        for &sigma in plan.sigmas {
            for run in 0..plan.runs {
                cells.push((si, sigma, run));
            }
        }
    }
    let per_cell: Vec<Result<Vec<BenchRow<F>>>> = cells
        .par_iter()
        .map(|&(si, sigma_phi, run)| {
            let scene = &plan.scenes[si];
            let spec = NoiseSpec {
                sigma_phi,
                seed: plan.seed,
                runs: plan.runs,
            };
            let z = make_noisy(scene, &spec, run)?;
            let mut rows = Vec::with_capacity(plan.algorithms.len());
            for algorithm in plan.algorithms {
                let (estimate, wall_clock_s) = if algorithm == NOISY_BASELINE {
                    (z.clone(), 0.0)
                } else {
                    let mut cfg = plan.base.clone();
                    cfg.sigma = noise_sigma(scene.mean_amplitude(), sigma_phi);
                    let started = Instant::now();
                    let estimate = run_named_algorithm(&z, algorithm, &cfg)?;
                    (estimate, started.elapsed().as_secs_f64())
                };
                rows.push(BenchRow {
                    image: scene.name.clone(),
                    sigma_phi,
                    algorithm: algorithm.clone(),
                    run,
                    report: evaluate_estimate(&estimate, scene)?,
                    wall_clock_s,
                });
            }
            Ok(rows)
        })
        .collect();

    let mut out = Vec::with_capacity(cells.len() * plan.algorithms.len());
    for cell in per_cell {
        out.extend(cell?);
    }
    Ok(out)
}

/// Run-means per (image, level, algorithm) cell, grouped by first
/// appearance. Levels are compared by their formatted text, the same key
/// the CSV and box-plot layers use.
pub fn aggregate_rows<F: Scalar>(rows: &[BenchRow<F>]) -> Vec<AggregateRow<F>> {
    let mut order: Vec<(String, String, String)> = Vec::new();
    let mut groups: HashMap<(String, String, String), Vec<&BenchRow<F>>> = HashMap::new();
    for row in rows {
        let key = (
            row.image.clone(),
            format!("{}", row.sigma_phi),
            row.algorithm.clone(),
        );
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(row);
    }
    order
        .into_iter()
        .map(|key| {
            let members = &groups[&key];
            let n = F::lit(members.len() as f64);
            let mean_of = |kind: MetricKind| -> F {
                members.iter().map(|r| r.report.get(kind)).sum::<F>() / n
            };
            AggregateRow {
                image: key.0,
                sigma_phi: members[0].sigma_phi,
                algorithm: key.2,
                runs: members.len(),
                mean: MetricReport {
                    psnr_phi: mean_of(MetricKind::PsnrPhi),
                    psnr_ampl: mean_of(MetricKind::PsnrAmpl),
                    rmse_phi_abs: mean_of(MetricKind::RmsePhiAbs),
                    rmse_a: mean_of(MetricKind::RmseA),
                    snr_c: mean_of(MetricKind::SnrC),
                    snr_phi_abs: mean_of(MetricKind::SnrPhiAbs),
                    delta_phi_shift: members
                        .iter()
                        .map(|r| r.report.delta_phi_shift)
                        .sum::<F>()
                        / n,
                },
            }
        })
        .collect()
}

/// Box-plot input cells for one criterion: each aggregate's run-mean,
/// keyed by algorithm, formatted level, and image.
pub fn boxplot_cells<F: Scalar>(
    aggregates: &[AggregateRow<F>],
    metric: MetricKind,
) -> Vec<MetricCell<F>> {
    aggregates
        .iter()
        .map(|a| MetricCell {
            algorithm: a.algorithm.clone(),
            level: format!("{}", a.sigma_phi),
            image: a.image.clone(),
            value: a.mean.get(metric),
        })
        .collect()
}

/// Writes the per-run results table. Every row carries `manifest_hash` so
/// it can be traced to the manifest describing how it was produced.
pub fn write_rows_csv<W: Write, F: Scalar>(
    out: W,
    rows: &[BenchRow<F>],
    manifest_hash: &str,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in rows {
        w.write_record(&[
            r.image.as_str(),
            &format!("{}", r.sigma_phi),
            r.algorithm.as_str(),
            &r.run.to_string(),
            &format!("{}", r.report.psnr_phi),
            &format!("{}", r.report.psnr_ampl),
            &format!("{}", r.report.rmse_phi_abs),
            &format!("{}", r.report.rmse_a),
            &format!("{}", r.report.snr_c),
            &format!("{}", r.report.snr_phi_abs),
            &format!("{}", r.wall_clock_s),
            manifest_hash,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a results table written by [`write_rows_csv`] — or by another
/// tool in the same schema, which is how externally computed methods join
/// the box plots. The metric columns are required; `wall_clock_s` is
/// optional and defaults to 0.
pub fn read_rows_csv<R: Read, F: Scalar>(input: R) -> Result<Vec<BenchRow<F>>> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    let find = |name: &str| -> Result<usize> {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            CdidError::InvalidConfig(format!("results CSV is missing column {name:?}"))
        })
    };
    let image_i = find("image")?;
    let sigma_i = find("sigma_phi")?;
    let algorithm_i = find("algorithm")?;
    let run_i = find("run")?;
    let metric_i: Vec<usize> = MetricKind::ALL
        .iter()
        .map(|k| find(k.name()))
        .collect::<Result<_>>()?;
    let wall_i = headers.iter().position(|h| h == "wall_clock_s");

    let parse_real = |field: &str, name: &str| -> Result<F> {
        field
            .trim()
            .parse::<f64>()
            .map(F::lit)
            .map_err(|_| CdidError::InvalidConfig(format!("bad {name} value {field:?}")))
    };

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let get = |i: usize| record.get(i).unwrap_or("");
        let m: Vec<F> = metric_i
            .iter()
            .zip(MetricKind::ALL)
            .map(|(&i, kind)| parse_real(get(i), kind.name()))
            .collect::<Result<_>>()?;
        rows.push(BenchRow {
            image: get(image_i).to_string(),
            sigma_phi: parse_real(get(sigma_i), "sigma_phi")?,
            algorithm: get(algorithm_i).to_string(),
            run: get(run_i).trim().parse().map_err(|_| {
                CdidError::InvalidConfig(format!("bad run index {:?}", get(run_i)))
            })?,
            report: MetricReport {
                psnr_phi: m[0],
                psnr_ampl: m[1],
                rmse_phi_abs: m[2],
                rmse_a: m[3],
                snr_c: m[4],
                snr_phi_abs: m[5],
                delta_phi_shift: F::zero(),
            },
            wall_clock_s: match wall_i {
                Some(i) => get(i).trim().parse::<f64>().map_err(|_| {
                    CdidError::InvalidConfig(format!("bad wall_clock_s value {:?}", get(i)))
                })?,
                None => 0.0,
            },
        });
    }
    Ok(rows)
}

/// Writes the run-mean aggregates table.
pub fn write_aggregate_csv<W: Write, F: Scalar>(
    out: W,
    aggregates: &[AggregateRow<F>],
    manifest_hash: &str,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "image",
        "sigma_phi",
        "algorithm",
        "runs",
        "psnr_phi",
        "psnr_ampl",
        "rmse_phi_abs",
        "rmse_a",
        "snr_c",
        "snr_phi_abs",
        "manifest_hash",
    ])?;
    for a in aggregates {
        w.write_record(&[
            a.image.as_str(),
            &format!("{}", a.sigma_phi),
            a.algorithm.as_str(),
            &a.runs.to_string(),
            &format!("{}", a.mean.psnr_phi),
            &format!("{}", a.mean.psnr_ampl),
            &format!("{}", a.mean.rmse_phi_abs),
            &format!("{}", a.mean.rmse_a),
            &format!("{}", a.mean.snr_c),
            &format!("{}", a.mean.snr_phi_abs),
            manifest_hash,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes per-algorithm box-plot statistics for one criterion.
pub fn write_boxplot_csv<W: Write, F: Scalar>(
    out: W,
    summaries: &[BoxplotSummary<F>],
    metric: MetricKind,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "metric", "min", "q25", "median", "q75", "max"])?;
    for s in summaries {
        w.write_record(&[
            s.algorithm.as_str(),
            metric.name(),
            &format!("{}", s.min),
            &format!("{}", s.q25),
            &format!("{}", s.median),
            &format!("{}", s.q75),
            &format!("{}", s.max),
        ])?;
    }
    w.flush()?;
    Ok(())
}
