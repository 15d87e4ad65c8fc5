use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::config::{validate, SimConfig, ValidationErrors};
use crate::grid::{GridState, ObstacleMask};
use crate::offset::{draw_offset, feasible_offsets, OffsetError, OffsetSource, SeededSource};

/// Per-step accounting.
///
/// `advanced + carried` equals the number of molecules present before the
/// step: every molecule is placed exactly once.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct StepLedger {
    /// Molecules added by inflow after the sweep.
    pub injected: u64,
    /// Molecules that advanced past the last row. Also counted in `advanced`.
    pub exited: u64,
    pub advanced: u64,
    /// Molecules that stayed in their row (blocked by capacity or obstacle).
    pub carried: u64,
    pub blocked_by_capacity: u64,
    pub blocked_by_obstacle: u64,
}

impl core::ops::AddAssign for StepLedger {
    fn add_assign(&mut self, rhs: Self) {
        self.injected += rhs.injected;
        self.exited += rhs.exited;
        self.advanced += rhs.advanced;
        self.carried += rhs.carried;
        self.blocked_by_capacity += rhs.blocked_by_capacity;
        self.blocked_by_obstacle += rhs.blocked_by_obstacle;
    }
}

/// Hooks into individual placements during a step. All methods default to no-ops.
pub trait StepObserver {
    /// A molecule advanced into `(row, col)`, which held `count_before` at that instant.
    fn on_advance(&mut self, _row: usize, _col: usize, _count_before: u32) {}
    /// A molecule stayed in its row and was placed at `(row, col)`.
    fn on_carry(&mut self, _row: usize, _col: usize) {}
    /// A molecule left the grid from column `col` of the last row.
    fn on_exit(&mut self, _col: usize) {}
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoopObserver;

impl StepObserver for NoopObserver {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("grid is {grid_rows}x{grid_cols} but mask/config is {rows}x{cols}")]
    DimensionMismatch {
        grid_rows: usize,
        grid_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("{count} molecules on obstacle cell ({row},{col})")]
    MoleculeOnObstacle { row: usize, col: usize, count: u32 },
    #[error(transparent)]
    Offset(#[from] OffsetError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("invalid config: {0}")]
    Invalid(ValidationErrors),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl From<ValidationErrors> for RunError {
    fn from(e: ValidationErrors) -> Self {
        RunError::Invalid(e)
    }
}

/// All frames of a run: frame 0 is the empty grid, frame `k` the state after step `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    config: SimConfig,
    mask: ObstacleMask,
    frames: Vec<GridState>,
    ledgers: Vec<StepLedger>,
}

impl History {
    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn mask(&self) -> &ObstacleMask {
        &self.mask
    }

    pub fn frames(&self) -> &[GridState] {
        &self.frames
    }

    pub fn ledgers(&self) -> &[StepLedger] {
        &self.ledgers
    }

    pub fn final_frame(&self) -> &GridState {
        self.frames.last().expect("history always holds frame 0")
    }
}

/// Highest row holding at least one molecule, or `None` for an empty grid.
pub fn front_row(grid: &GridState) -> Option<usize> {
    (1..=grid.rows())
        .rev()
        .find(|&row| grid.row(row).iter().any(|&c| c > 0))
}

/// Advances `old` by one time step.
pub fn step<S: OffsetSource + ?Sized>(
    old: &GridState,
    mask: &ObstacleMask,
    config: &SimConfig,
    source: &mut S,
) -> Result<(GridState, StepLedger), EngineError> {
    step_observed(old, mask, config, source, &mut NoopObserver)
}

/// [`step`] with every placement reported to `observer`.
///
/// Rows are swept from the material front down to row 1. `advance_buf`
/// holds the in-progress new contents of row `i + 1` and starts each row
/// holding the molecules that stayed in row `i + 1`; `stay_buf` collects
/// the molecules staying in row `i` and becomes the next `advance_buf`.
pub fn step_observed<S, O>(
    old: &GridState,
    mask: &ObstacleMask,
    config: &SimConfig,
    source: &mut S,
    observer: &mut O,
) -> Result<(GridState, StepLedger), EngineError>
where
    S: OffsetSource + ?Sized,
    O: StepObserver + ?Sized,
{
    let (rows, cols) = (old.rows(), old.cols());
    if (mask.rows(), mask.cols()) != (rows, cols) || (config.rows, config.cols) != (rows, cols) {
        return Err(EngineError::DimensionMismatch {
            grid_rows: rows,
            grid_cols: cols,
            rows: mask.rows(),
            cols: mask.cols(),
        });
    }
    for (idx, (&count, &blocked)) in old.counts().iter().zip(mask.blocked()).enumerate() {
        if blocked && count > 0 {
            return Err(EngineError::MoleculeOnObstacle {
                row: idx / cols + 1,
                col: idx % cols + 1,
                count,
            });
        }
    }

    let capacity = config.capacity;
    let mut ledger = StepLedger::default();
    let mut new = GridState::empty(rows, cols);
    let mut advance_buf = vec![0u32; cols];
    let mut stay_buf = vec![0u32; cols];

    if let Some(front) = front_row(old) {
        for row in (1..=front).rev() {
            stay_buf.fill(0);
            let exits = row == rows;
            for (col_idx, &count) in old.row(row).iter().enumerate() {
                let col = col_idx + 1;
                if count == 0 {
                    continue;
                }
                let feasible = feasible_offsets(col, cols)?;
                for _ in 0..count {
                    let r = draw_offset(source, feasible)?;
                    let target = col.wrapping_add_signed(isize::from(r));
                    if exits {
                        ledger.exited += 1;
                        ledger.advanced += 1;
                        observer.on_exit(col);
                        continue;
                    }
                    let dest = &mut advance_buf[target - 1];
                    let blocked = if mask.is_blocked(row + 1, target) {
                        ledger.blocked_by_obstacle += 1;
                        true
                    } else if *dest >= capacity {
                        ledger.blocked_by_capacity += 1;
                        true
                    } else {
                        false
                    };
                    if blocked {
                        // A sideways target on an obstacle falls back to the origin cell.
                        let stay_col = if mask.is_blocked(row, target) {
                            col
                        } else {
                            target
                        };
                        stay_buf[stay_col - 1] += 1;
                        ledger.carried += 1;
                        observer.on_carry(row, stay_col);
                    } else {
                        observer.on_advance(row + 1, target, *dest);
                        *dest += 1;
                        ledger.advanced += 1;
                    }
                }
            }
            if !exits {
                new.row_mut(row + 1).copy_from_slice(&advance_buf);
            }
            core::mem::swap(&mut advance_buf, &mut stay_buf);
        }
        new.row_mut(1).copy_from_slice(&advance_buf);
    }

    let first = new.row_mut(1);
    for &col in config.inflow.columns() {
        first[col - 1] += 1;
        ledger.injected += 1;
    }

    Ok((new, ledger))
}

/// Runs `config` from the empty grid with offsets seeded from `config.seed`.
pub fn run(config: &SimConfig) -> Result<History, RunError> {
    run_with_source(config, &mut SeededSource::new(config.seed))
}

pub fn run_with_source<S: OffsetSource + ?Sized>(
    config: &SimConfig,
    source: &mut S,
) -> Result<History, RunError> {
    run_observed(config, source, &mut NoopObserver)
}

/// [`run_with_source`] reporting every placement of every step to `observer`.
pub fn run_observed<S, O>(
    config: &SimConfig,
    source: &mut S,
    observer: &mut O,
) -> Result<History, RunError>
where
    S: OffsetSource + ?Sized,
    O: StepObserver + ?Sized,
{
    let config = validate(config.clone())?;
    let mask = config.obstacle_mask();
    let mut frames = Vec::with_capacity(config.steps + 1);
    let mut ledgers = Vec::with_capacity(config.steps);
    frames.push(GridState::empty(config.rows, config.cols));
    for _ in 0..config.steps {
        let (next, ledger) = step_observed(
            frames.last().expect("frame 0 present"),
            &mask,
            &config,
            source,
            observer,
        )?;
        frames.push(next);
        ledgers.push(ledger);
    }
    Ok(History {
        config,
        mask,
        frames,
        ledgers,
    })
}
