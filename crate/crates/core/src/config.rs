use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::grid::ObstacleMask;

/// Inclusive, 1-based rectangle of obstacle cells: rows `r1..=r2`, columns `c1..=c2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub r1: usize,
    pub c1: usize,
    pub r2: usize,
    pub c2: usize,
}

impl Rect {
    pub const fn new(r1: usize, c1: usize, r2: usize, c2: usize) -> Self {
        Self { r1, c1, r2, c2 }
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        (self.r1..=self.r2).contains(&row) && (self.c1..=self.c2).contains(&col)
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})-({},{})", self.r1, self.c1, self.r2, self.c2)
    }
}

/// Columns of row 1 that receive one new molecule per step.
///
/// Strictly increasing. Nonempty unless built with [`InflowPattern::none`];
/// the upper bound against the grid width is checked by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InflowPattern {
    columns: Vec<usize>,
}

impl InflowPattern {
    pub fn new(columns: Vec<usize>) -> Result<Self, ConfigError> {
        if columns.is_empty() {
            return Err(ConfigError::EmptyInflow);
        }
        if let Some(w) = columns.windows(2).find(|w| w[0] >= w[1]) {
            return Err(ConfigError::InflowNotIncreasing {
                prev: w[0],
                next: w[1],
            });
        }
        Ok(Self { columns })
    }

    /// No inflow at all. Useful for driving [`crate::step`] directly on a
    /// prepared grid; [`validate`] rejects it.
    pub fn none() -> Self {
        Self {
            columns: Vec::new(),
        }
    }

    pub fn single(col: usize) -> Self {
        Self {
            columns: alloc::vec![col],
        }
    }

    /// Every other column starting at `start` (1 or 2 for the two phases).
    pub fn alternate(cols: usize, start: usize) -> Result<Self, ConfigError> {
        Self::new((start.max(1)..=cols).step_by(2).collect())
    }

    /// The whole lower side, columns `1..=cols`.
    pub fn all(cols: usize) -> Result<Self, ConfigError> {
        Self::new((1..=cols).collect())
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }
}

/// Parameters of one run.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimConfig {
    pub rows: usize,
    pub cols: usize,
    pub steps: usize,
    /// Largest destination count that still blocks advancement: a molecule
    /// advances only into a cell currently holding fewer than `capacity`.
    pub capacity: u32,
    pub seed: u64,
    pub inflow: InflowPattern,
    pub obstacles: Vec<Rect>,
}

impl SimConfig {
    pub fn obstacle_mask(&self) -> ObstacleMask {
        ObstacleMask::from_rects(self.rows, self.cols, &self.obstacles)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("rows must be ≥ 1")]
    ZeroRows,
    #[error("cols must be ≥ 1")]
    ZeroCols,
    #[error("d must be ≥ 1")]
    ZeroCapacity,
    #[error("inflow pattern has no columns")]
    EmptyInflow,
    #[error("inflow columns must be strictly increasing ({prev} then {next})")]
    InflowNotIncreasing { prev: usize, next: usize },
    #[error("inflow column {col} outside 1..={cols}")]
    InflowOutOfRange { col: usize, cols: usize },
    #[error("obstacle rect {rect} is inverted")]
    InvertedRect { rect: Rect },
    #[error("obstacle rect {rect} outside {rows}x{cols} grid")]
    RectOutOfBounds { rect: Rect, rows: usize, cols: usize },
    #[error("obstacle rect {rect} covers inflow cell (1,{col})")]
    InflowBlocked { rect: Rect, col: usize },
}

/// Every violation found by [`validate`], in check order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationErrors(pub Vec<ConfigError>);

impl ValidationErrors {
    pub fn errors(&self) -> &[ConfigError] {
        &self.0
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl core::error::Error for ValidationErrors {}

/// Checks every invariant of `config` and reports all violations at once.
/// A config that passes is returned unchanged.
pub fn validate(config: SimConfig) -> Result<SimConfig, ValidationErrors> {
    let mut errors = Vec::new();
    if config.rows == 0 {
        errors.push(ConfigError::ZeroRows);
    }
    if config.cols == 0 {
        errors.push(ConfigError::ZeroCols);
    }
    if config.capacity == 0 {
        errors.push(ConfigError::ZeroCapacity);
    }

    let cols = config.inflow.columns();
    if cols.is_empty() {
        errors.push(ConfigError::EmptyInflow);
    }
    if let Some(w) = cols.windows(2).find(|w| w[0] >= w[1]) {
        errors.push(ConfigError::InflowNotIncreasing {
            prev: w[0],
            next: w[1],
        });
    }
    for &col in cols {
        if col == 0 || col > config.cols {
            errors.push(ConfigError::InflowOutOfRange {
                col,
                cols: config.cols,
            });
        }
    }

    for &rect in &config.obstacles {
        if rect.r1 > rect.r2 || rect.c1 > rect.c2 {
            errors.push(ConfigError::InvertedRect { rect });
            continue;
        }
        if rect.r1 == 0 || rect.c1 == 0 || rect.r2 > config.rows || rect.c2 > config.cols {
            errors.push(ConfigError::RectOutOfBounds {
                rect,
                rows: config.rows,
                cols: config.cols,
            });
            continue;
        }
        for &col in cols {
            if rect.contains(1, col) {
                errors.push(ConfigError::InflowBlocked { rect, col });
            }
        }
    }

    if errors.is_empty() {
        Ok(config)
    } else {
        Err(ValidationErrors(errors))
    }
}
