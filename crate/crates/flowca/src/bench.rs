//! Single-threaded throughput measurement.

use std::time::{Duration, Instant};

use flowca_core::{step, validate, GridState, RunError, SeededSource, SimConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchSample {
    pub elapsed: Duration,
    /// rows × cols × steps
    pub cell_steps: u64,
    /// Advancements plus sideways placements over the whole run.
    pub molecule_moves: u64,
}

impl BenchSample {
    pub fn cell_steps_per_sec(&self) -> f64 {
        self.cell_steps as f64 / self.elapsed.as_secs_f64().max(1e-9)
    }

    pub fn moves_per_sec(&self) -> f64 {
        self.molecule_moves as f64 / self.elapsed.as_secs_f64().max(1e-9)
    }
}

/// Times one full run, keeping only the current frame.
pub fn bench_once(config: &SimConfig) -> Result<BenchSample, RunError> {
    let config = validate(config.clone())?;
    let mask = config.obstacle_mask();
    let mut source = SeededSource::new(config.seed);
    let mut grid = GridState::empty(config.rows, config.cols);
    let mut moves = 0u64;
    let start = Instant::now();
    for _ in 0..config.steps {
        let (next, ledger) = step(&grid, &mask, &config, &mut source)?;
        moves += ledger.advanced + ledger.carried;
        grid = next;
    }
    let elapsed = start.elapsed();
    Ok(BenchSample {
        elapsed,
        cell_steps: (config.rows * config.cols * config.steps) as u64,
        molecule_moves: moves,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub samples: Vec<BenchSample>,
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

impl BenchReport {
    pub fn median_cell_steps_per_sec(&self) -> f64 {
        median(self.samples.iter().map(BenchSample::cell_steps_per_sec).collect())
    }

    pub fn median_moves_per_sec(&self) -> f64 {
        median(self.samples.iter().map(BenchSample::moves_per_sec).collect())
    }
}

pub fn bench(config: &SimConfig, repeat: usize) -> Result<BenchReport, RunError> {
    let samples = (0..repeat.max(1))
        .map(|_| bench_once(config))
        .collect::<Result<_, _>>()?;
    Ok(BenchReport { samples })
}
