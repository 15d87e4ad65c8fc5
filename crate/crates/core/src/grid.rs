use alloc::vec;
use alloc::vec::Vec;

use crate::config::Rect;

/// Molecule counts on an `rows × cols` lattice, stored row-major with row 1 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridState {
    rows: usize,
    cols: usize,
    counts: Vec<u32>,
}

impl GridState {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            counts: vec![0; rows * cols],
        }
    }

    /// Builds a grid from row-major counts (row 1 first). Returns `None` when
    /// the length does not match the dimensions.
    pub fn from_counts(rows: usize, cols: usize, counts: Vec<u32>) -> Option<Self> {
        (counts.len() == rows * cols).then_some(Self { rows, cols, counts })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn index(&self, row: usize, col: usize) -> usize {
        assert!(
            (1..=self.rows).contains(&row) && (1..=self.cols).contains(&col),
            "cell ({row}, {col}) outside {}x{} grid",
            self.rows,
            self.cols
        );
        (row - 1) * self.cols + (col - 1)
    }

    /// Count at `(row, col)`, 1-based.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.counts[self.index(row, col)]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, count: u32) {
        let idx = self.index(row, col);
        self.counts[idx] = count;
    }

    /// Counts of row `row` (1-based), left to right.
    pub fn row(&self, row: usize) -> &[u32] {
        assert!((1..=self.rows).contains(&row), "row {row} outside grid");
        let start = (row - 1) * self.cols;
        &self.counts[start..start + self.cols]
    }

    pub(crate) fn row_mut(&mut self, row: usize) -> &mut [u32] {
        let start = (row - 1) * self.cols;
        &mut self.counts[start..start + self.cols]
    }

    /// Row-major counts, row 1 first.
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn max_count(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }
}

/// Static obstacle cells of a run.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObstacleMask {
    rows: usize,
    cols: usize,
    blocked: Vec<bool>,
}

impl ObstacleMask {
    pub fn clear(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            blocked: vec![false; rows * cols],
        }
    }

    /// Marks every cell covered by `rects`. Rectangles must already lie inside
    /// the grid (see [`crate::validate`]).
    pub fn from_rects(rows: usize, cols: usize, rects: &[Rect]) -> Self {
        let mut mask = Self::clear(rows, cols);
        for rect in rects {
            for row in rect.r1..=rect.r2 {
                for col in rect.c1..=rect.c2 {
                    mask.set(row, col, true);
                }
            }
        }
        mask
    }

    pub fn from_blocked(rows: usize, cols: usize, blocked: Vec<bool>) -> Option<Self> {
        (blocked.len() == rows * cols).then_some(Self {
            rows,
            cols,
            blocked,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_blocked(&self, row: usize, col: usize) -> bool {
        assert!(
            (1..=self.rows).contains(&row) && (1..=self.cols).contains(&col),
            "cell ({row}, {col}) outside {}x{} mask",
            self.rows,
            self.cols
        );
        self.blocked[(row - 1) * self.cols + (col - 1)]
    }

    pub fn set(&mut self, row: usize, col: usize, blocked: bool) {
        assert!((1..=self.rows).contains(&row) && (1..=self.cols).contains(&col));
        self.blocked[(row - 1) * self.cols + (col - 1)] = blocked;
    }

    pub fn row(&self, row: usize) -> &[bool] {
        assert!((1..=self.rows).contains(&row), "row {row} outside mask");
        let start = (row - 1) * self.cols;
        &self.blocked[start..start + self.cols]
    }

    pub fn blocked(&self) -> &[bool] {
        &self.blocked
    }

    pub fn blocked_count(&self) -> usize {
        self.blocked.iter().filter(|&&b| b).count()
    }
}
