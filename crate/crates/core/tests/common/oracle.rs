//! Brute-force reference for one automaton step.
//!
//! Works on a dense `Vec<Vec<i64>>` with obstacles stored as `-1`, writing
//! straight into the new grid instead of using row buffers. When row `i` is
//! processed, new row `i + 1` already holds exactly the molecules that
//! stayed in row `i + 1`, so testing the new grid is equivalent to testing
//! the in-progress destination row.
#![allow(dead_code)]

use flowca_core::{GridState, ObstacleMask};

pub type Dense = Vec<Vec<i64>>;

pub fn to_dense(grid: &GridState, mask: &ObstacleMask) -> Dense {
    (1..=grid.rows())
        .map(|i| {
            (1..=grid.cols())
                .map(|j| if mask.is_blocked(i, j) { -1 } else { i64::from(grid.get(i, j)) })
                .collect()
        })
        .collect()
}

pub fn to_grid(dense: &Dense) -> GridState {
    let rows = dense.len();
    let cols = dense[0].len();
    let counts = dense.iter().flatten().map(|&v| v.max(0) as u32).collect();
    GridState::from_counts(rows, cols, counts).unwrap()
}

fn choices(j: usize, m: usize) -> Vec<i8> {
    [-1i8, 0, 1]
        .into_iter()
        .filter(|&r| {
            let t = j as i64 + i64::from(r);
            t >= 1 && t <= m as i64
        })
        .collect()
}

/// One step. `pick` chooses an offset from the feasible list; every choice
/// is appended to `script` in draw order. `inflow` columns are 1-based.
pub fn oracle_step(
    old: &Dense,
    d: i64,
    inflow: &[usize],
    pick: &mut dyn FnMut(&[i8]) -> i8,
    script: &mut Vec<i8>,
) -> Dense {
    let n = old.len();
    let m = old[0].len();
    let mut new: Dense = old
        .iter()
        .map(|row| row.iter().map(|&v| if v < 0 { -1 } else { 0 }).collect())
        .collect();
    for i in (1..=n).rev() {
        for j in 1..=m {
            let count = old[i - 1][j - 1];
            for _ in 0..count.max(0) {
                let opts = choices(j, m);
                let r = pick(&opts);
                assert!(opts.contains(&r));
                script.push(r);
                let t = (j as i64 + i64::from(r)) as usize;
                if i == n {
                    continue;
                }
                let dest = new[i][t - 1];
                if dest < 0 || dest >= d {
                    if new[i - 1][t - 1] < 0 {
                        new[i - 1][j - 1] += 1;
                    } else {
                        new[i - 1][t - 1] += 1;
                    }
                } else {
                    new[i][t - 1] += 1;
                }
            }
        }
    }
    for &c in inflow {
        new[0][c - 1] += 1;
    }
    new
}

pub fn total(dense: &Dense) -> i64 {
    dense.iter().flatten().filter(|&&v| v > 0).sum()
}
