//! Parallel capacity sweeps and the CSV surfaces around them.

use flowca_core::stats::{capacity_run, check_sweep_args, reduce_sweep};
use flowca_core::{SimConfig, SweepError, SweepRow};
use rayon::prelude::*;
use thiserror::Error;

/// Same table as [`flowca_core::sweep_capacity`], with the `(d, seed)` runs
/// spread over the rayon pool. Results are reduced in `(d, seed)` order, so
/// the output does not depend on scheduling.
pub fn par_sweep_capacity(
    base: &SimConfig,
    d_values: &[u32],
    seeds: &[u64],
) -> Result<Vec<SweepRow>, SweepError> {
    check_sweep_args(d_values, seeds)?;
    let jobs: Vec<(u32, u64)> = d_values
        .iter()
        .flat_map(|&d| seeds.iter().map(move |&s| (d, s)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(d, seed)| capacity_run(base, d, seed))
        .collect::<Result<Vec<u32>, _>>()?;
    Ok(reduce_sweep(d_values, seeds.len(), &results))
}

/// `d,mean_max_mol` header and one row per capacity, LF endings.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("d,mean_max_mol\n");
    for row in rows {
        out.push_str(&format!("{},{}\n", row.d, row.mean_max_mol));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointsError {
    #[error("line {line}: expected `x,y`, got `{text}`")]
    Malformed { line: usize, text: String },
}

/// Reads `x,y` pairs. A first line whose fields are not numbers is taken as
/// a header; blank lines are skipped.
pub fn parse_points_csv(text: &str) -> Result<Vec<(f64, f64)>, PointsError> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let parsed = line.split_once(',').and_then(|(x, y)| {
            Some((x.trim().parse::<f64>().ok()?, y.trim().parse::<f64>().ok()?))
        });
        match parsed {
            Some(p) => points.push(p),
            None if idx == 0 => {}
            None => {
                return Err(PointsError::Malformed {
                    line: idx + 1,
                    text: line.to_string(),
                })
            }
        }
    }
    Ok(points)
}
