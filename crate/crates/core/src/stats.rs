//! Run statistics and the capacity sweep.
//!
//! `max_mol` is the largest count seen in any cell over a whole run, frame 0
//! included. The sweep reruns a base config over several capacities and
//! seeds and averages `max_mol` per capacity; [`log_fit`] then fits
//! `y = a·ln x + b` to the resulting table.

use alloc::vec::Vec;

use thiserror::Error;

use crate::config::SimConfig;
use crate::engine::{run, History, RunError};

/// Molecules and free (non-obstacle) cells of one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowOccupancy {
    pub molecules: u64,
    pub free_cells: usize,
}

impl RowOccupancy {
    /// Mean molecules per free cell; 0 for a row that is all obstacle.
    pub fn mean(&self) -> f64 {
        if self.free_cells == 0 {
            0.0
        } else {
            self.molecules as f64 / self.free_cells as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunStats {
    pub max_mol: u32,
    pub total_injected: u64,
    pub total_exited: u64,
    /// Occupancy of each row of the final frame, row 1 first.
    pub final_rows: Vec<RowOccupancy>,
}

pub fn compute_stats(history: &History) -> RunStats {
    let max_mol = history
        .frames()
        .iter()
        .map(|f| f.max_count())
        .max()
        .unwrap_or(0);
    let (total_injected, total_exited) = history
        .ledgers()
        .iter()
        .fold((0, 0), |(inj, ex), l| (inj + l.injected, ex + l.exited));
    let last = history.final_frame();
    let mask = history.mask();
    let final_rows = (1..=last.rows())
        .map(|row| RowOccupancy {
            molecules: last.row(row).iter().map(|&c| u64::from(c)).sum(),
            free_cells: mask.row(row).iter().filter(|&&b| !b).count(),
        })
        .collect();
    RunStats {
        max_mol,
        total_injected,
        total_exited,
        final_rows,
    }
}

/// Least-squares fit of `y = a·ln x + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
}

impl LogFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.a * libm::log(x) + self.b
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("x must be positive, got {0}")]
    NonPositiveX(f64),
    #[error("non-finite coordinate in point {0}")]
    NonFinite(usize),
    #[error("degenerate abscissae: all x equal")]
    DegenerateAbscissae,
}

/// Ordinary least squares of `y` against `ln x`, in closed form on centred sums.
pub fn log_fit(points: &[(f64, f64)]) -> Result<LogFit, FitError> {
    if points.len() < 2 {
        return Err(FitError::TooFewPoints(points.len()));
    }
    for (i, &(x, y)) in points.iter().enumerate() {
        if !x.is_finite() || !y.is_finite() {
            return Err(FitError::NonFinite(i));
        }
        if x <= 0.0 {
            return Err(FitError::NonPositiveX(x));
        }
    }
    if points.iter().all(|&(x, _)| x == points[0].0) {
        return Err(FitError::DegenerateAbscissae);
    }

    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|&(x, _)| libm::log(x)).collect();
    let mean_lx = lx.iter().sum::<f64>() / n;
    let mean_y = points.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut ss_tot) = (0.0, 0.0, 0.0);
    for (&u, &(_, y)) in lx.iter().zip(points) {
        let du = u - mean_lx;
        let dy = y - mean_y;
        sxx += du * du;
        sxy += du * dy;
        ss_tot += dy * dy;
    }
    let a = sxy / sxx;
    let b = mean_y - a * mean_lx;
    let ss_res: f64 = lx
        .iter()
        .zip(points)
        .map(|(&u, &(_, y))| {
            let e = y - (a * u + b);
            e * e
        })
        .sum();
    let r_squared = if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(LogFit { a, b, r_squared })
}

/// Average ranks (1-based), ties sharing the mean of their positions.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut out = alloc::vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            out[idx] = rank;
        }
        start = end;
    }
    out
}

/// Spearman rank correlation: Pearson correlation of the average ranks.
/// `None` when the inputs differ in length, have fewer than two points, or
/// either side is constant.
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / libm::sqrt(sxx * syy))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub d: u32,
    pub mean_max_mol: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("d list is empty")]
    EmptyCapacities,
    #[error("d list must be strictly increasing ({prev} then {next})")]
    CapacitiesNotIncreasing { prev: u32, next: u32 },
    #[error("seed list is empty")]
    EmptySeeds,
    #[error("run with d={d}, seed={seed} failed: {source}")]
    Run {
        d: u32,
        seed: u64,
        #[source]
        source: RunError,
    },
}

/// Checks the argument lists of a sweep without running anything.
pub fn check_sweep_args(d_values: &[u32], seeds: &[u64]) -> Result<(), SweepError> {
    if d_values.is_empty() {
        return Err(SweepError::EmptyCapacities);
    }
    if let Some(w) = d_values.windows(2).find(|w| w[0] >= w[1]) {
        return Err(SweepError::CapacitiesNotIncreasing {
            prev: w[0],
            next: w[1],
        });
    }
    if seeds.is_empty() {
        return Err(SweepError::EmptySeeds);
    }
    Ok(())
}

/// `max_mol` of a single run of `base` with capacity `d` and seed `seed`.
pub fn capacity_run(base: &SimConfig, d: u32, seed: u64) -> Result<u32, SweepError> {
    let config = SimConfig {
        capacity: d,
        seed,
        ..base.clone()
    };
    run(&config)
        .map(|h| compute_stats(&h).max_mol)
        .map_err(|source| SweepError::Run { d, seed, source })
}

/// Reduces per-run results laid out `d`-major (`results[i * seeds + k]`) into the sweep table.
pub fn reduce_sweep(d_values: &[u32], seed_count: usize, results: &[u32]) -> Vec<SweepRow> {
    d_values
        .iter()
        .zip(results.chunks(seed_count))
        .map(|(&d, chunk)| SweepRow {
            d,
            mean_max_mol: chunk.iter().map(|&m| f64::from(m)).sum::<f64>() / seed_count as f64,
        })
        .collect()
}

/// Mean `max_mol` over `seeds` for each capacity in `d_values`, in `d` order.
pub fn sweep_capacity(
    base: &SimConfig,
    d_values: &[u32],
    seeds: &[u64],
) -> Result<Vec<SweepRow>, SweepError> {
    check_sweep_args(d_values, seeds)?;
    let mut results = Vec::with_capacity(d_values.len() * seeds.len());
    for &d in d_values {
        for &seed in seeds {
            results.push(capacity_run(base, d, seed)?);
        }
    }
    Ok(reduce_sweep(d_values, seeds.len(), &results))
}
