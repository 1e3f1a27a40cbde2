//! Box-plot statistics of metric deltas against the best algorithm.
//!
//! For a complete table of metric values over (algorithm, noise level,
//! image) cells, each cell's delta is its value minus the best value any
//! algorithm achieved on that same (level, image) pair — zero for the
//! winner, negative for everyone else. The per-algorithm distribution of
//! deltas is summarized by the classic five-number box plot.

use std::collections::HashMap;

use crate::error::{CdidError, Result};
use crate::scalar::Scalar;

/// One metric measurement: algorithm × noise level × image → value.
/// The level is carried as a string key (a formatted sigma) so that cells
/// group exactly, without float-equality pitfalls.
#[derive(Clone, Debug)]
pub struct MetricCell<F: Scalar> {
    pub algorithm: String,
    pub level: String,
    pub image: String,
    pub value: F,
}

/// Five-number summary of one algorithm's deltas against the per-cell best.
#[derive(Clone, Debug)]
pub struct BoxplotSummary<F: Scalar> {
    pub algorithm: String,
    pub min: F,
    pub q25: F,
    pub median: F,
    pub q75: F,
    pub max: F,
}

/// Linear-interpolation quantile of an ascending-sorted sample (the
/// convention of most statistics packages): rank `h = (n-1)p` split into
/// whole and fractional parts, interpolating between the two neighboring
/// order statistics.
pub fn quantile_type7<F: Scalar>(sorted: &[F], p: f64) -> Result<F> {
    if sorted.is_empty() {
        return Err(CdidError::InvalidConfig(
            "quantile of an empty sample".into(),
        ));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(CdidError::InvalidConfig(format!(
            "quantile probability {p} outside [0, 1]"
        )));
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = F::lit(h - h.floor());
    if lo + 1 == sorted.len() {
        return Ok(sorted[lo]);
    }
    Ok(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]))
}

/// Deltas of each cell against the best algorithm on that cell, summarized
/// per algorithm as (min, 25%, median, 75%, max).
///
/// The table must be complete: every algorithm must carry exactly one value
/// for every (level, image) pair seen anywhere in the input. Output rows
/// follow the algorithms' first appearance in the input.
pub fn boxplot_deltas<F: Scalar>(cells: &[MetricCell<F>]) -> Result<Vec<BoxplotSummary<F>>> {
    if cells.is_empty() {
        return Err(CdidError::MissingCells("empty input table".into()));
    }
    // Index algorithms and (level, image) pairs in first-appearance order.
    let mut algorithms: Vec<&str> = Vec::new();
    let mut algo_index: HashMap<&str, usize> = HashMap::new();
    let mut pairs: Vec<(&str, &str)> = Vec::new();
    let mut pair_index: HashMap<(&str, &str), usize> = HashMap::new();
    for cell in cells {
        if !num_traits::Float::is_finite(cell.value) {
            return Err(CdidError::NonFinite("box-plot cell value"));
        }
        algo_index.entry(&cell.algorithm).or_insert_with(|| {
            algorithms.push(&cell.algorithm);
            algorithms.len() - 1
        });
        pair_index
            .entry((&cell.level, &cell.image))
            .or_insert_with(|| {
                pairs.push((&cell.level, &cell.image));
                pairs.len() - 1
            });
    }

    let mut grid: Vec<Option<F>> = vec![None; algorithms.len() * pairs.len()];
    for cell in cells {
        let a = algo_index[cell.algorithm.as_str()];
        let p = pair_index[&(cell.level.as_str(), cell.image.as_str())];
        let slot = &mut grid[a * pairs.len() + p];
        if slot.is_some() {
            return Err(CdidError::InvalidConfig(format!(
                "duplicate cell: algorithm={}, level={}, image={}",
                cell.algorithm, cell.level, cell.image
            )));
        }
        *slot = Some(cell.value);
    }
    for (a, algo) in algorithms.iter().enumerate() {
        for (p, (level, image)) in pairs.iter().enumerate() {
            if grid[a * pairs.len() + p].is_none() {
                return Err(CdidError::MissingCells(format!(
                    "algorithm={algo}, level={level}, image={image}"
                )));
            }
        }
    }

    // Best value per (level, image) pair across algorithms.
    let best: Vec<F> = (0..pairs.len())
        .map(|p| {
            (0..algorithms.len())
                .map(|a| grid[a * pairs.len() + p].unwrap())
                .fold(F::neg_infinity(), F::max)
        })
        .collect();

    algorithms
        .iter()
        .enumerate()
        .map(|(a, algo)| {
            let mut deltas: Vec<F> = (0..pairs.len())
                .map(|p| grid[a * pairs.len() + p].unwrap() - best[p])
                .collect();
            deltas.sort_by(|x, y| x.partial_cmp(y).expect("finite deltas"));
            Ok(BoxplotSummary {
                algorithm: algo.to_string(),
                min: deltas[0],
                q25: quantile_type7(&deltas, 0.25)?,
                median: quantile_type7(&deltas, 0.5)?,
                q75: quantile_type7(&deltas, 0.75)?,
                max: deltas[deltas.len() - 1],
            })
        })
        .collect()
}
