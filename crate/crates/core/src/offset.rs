use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OffsetError {
    #[error("column {col} outside 1..={cols}")]
    ColumnOutOfRange { col: usize, cols: usize },
    #[error("empty feasible offset set")]
    EmptyFeasible,
    #[error("scripted value {value} not feasible")]
    NotFeasible { value: i8 },
    #[error("offset script exhausted after {used} draws")]
    ScriptExhausted { used: usize },
}

/// Lateral offsets that keep a molecule in column `col` on a grid `cols` wide.
///
/// Walls restrict the choice set rather than clamping a draw, so each
/// remaining offset stays equally likely.
pub fn feasible_offsets(col: usize, cols: usize) -> Result<&'static [i8], OffsetError> {
    if col == 0 || col > cols {
        return Err(OffsetError::ColumnOutOfRange { col, cols });
    }
    Ok(match (col == 1, col == cols) {
        (true, true) => &[0],
        (true, false) => &[0, 1],
        (false, true) => &[-1, 0],
        (false, false) => &[-1, 0, 1],
    })
}

/// A deterministic stream of lateral offsets.
pub trait OffsetSource {
    /// Picks one member of `feasible` (nonempty), consuming exactly one value
    /// from the stream.
    fn draw(&mut self, feasible: &[i8]) -> Result<i8, OffsetError>;
}

impl<S: OffsetSource + ?Sized> OffsetSource for &mut S {
    fn draw(&mut self, feasible: &[i8]) -> Result<i8, OffsetError> {
        (**self).draw(feasible)
    }
}

/// Draws from `source` and checks the result is a member of `feasible`.
pub fn draw_offset<S: OffsetSource + ?Sized>(
    source: &mut S,
    feasible: &[i8],
) -> Result<i8, OffsetError> {
    if feasible.is_empty() {
        return Err(OffsetError::EmptyFeasible);
    }
    let value = source.draw(feasible)?;
    if feasible.contains(&value) {
        Ok(value)
    } else {
        Err(OffsetError::NotFeasible { value })
    }
}

/// Uniform choice over the feasible set, driven by ChaCha8 seeded from a `u64`.
#[derive(Debug, Clone)]
pub struct SeededSource {
    rng: ChaCha8Rng,
}

impl SeededSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl OffsetSource for SeededSource {
    fn draw(&mut self, feasible: &[i8]) -> Result<i8, OffsetError> {
        if feasible.is_empty() {
            return Err(OffsetError::EmptyFeasible);
        }
        Ok(feasible[self.rng.gen_range(0..feasible.len())])
    }
}

/// Replays a fixed list of offsets, for exact traces in tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptedSource {
    script: Vec<i8>,
    pos: usize,
}

impl ScriptedSource {
    pub fn new(script: Vec<i8>) -> Self {
        Self { script, pos: 0 }
    }

    /// Number of offsets consumed so far.
    pub fn used(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.script.len() - self.pos
    }
}

impl OffsetSource for ScriptedSource {
    fn draw(&mut self, _feasible: &[i8]) -> Result<i8, OffsetError> {
        let value = *self
            .script
            .get(self.pos)
            .ok_or(OffsetError::ScriptExhausted { used: self.pos })?;
        self.pos += 1;
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn feasible_sets() {
        assert_eq!(feasible_offsets(5, 10), Ok(&[-1i8, 0, 1][..]));
        assert_eq!(feasible_offsets(1, 10), Ok(&[0i8, 1][..]));
        assert_eq!(feasible_offsets(10, 10), Ok(&[-1i8, 0][..]));
        assert_eq!(feasible_offsets(1, 1), Ok(&[0i8][..]));
        assert_eq!(
            feasible_offsets(0, 3),
            Err(OffsetError::ColumnOutOfRange { col: 0, cols: 3 })
        );
        assert!(feasible_offsets(4, 3).is_err());
    }

    #[test]
    fn scripted_returns_script() {
        let mut src = ScriptedSource::new(vec![0]);
        assert_eq!(draw_offset(&mut src, &[-1, 0, 1]), Ok(0));
        assert_eq!(
            draw_offset(&mut src, &[-1, 0, 1]),
            Err(OffsetError::ScriptExhausted { used: 1 })
        );
    }

    #[test]
    fn scripted_infeasible_is_loud() {
        let mut src = ScriptedSource::new(vec![-1]);
        assert_eq!(
            draw_offset(&mut src, &[0, 1]),
            Err(OffsetError::NotFeasible { value: -1 })
        );
    }

    #[test]
    fn empty_feasible_rejected() {
        let mut src = SeededSource::new(3);
        assert_eq!(draw_offset(&mut src, &[]), Err(OffsetError::EmptyFeasible));
    }

    #[test]
    fn uniform_within_three_sigma() {
        // Binomial(30000, 1/3): sigma = sqrt(30000 * 1/3 * 2/3) ≈ 81.65.
        let draws = 30_000usize;
        let mut src = SeededSource::new(0xC0FFEE);
        let mut hist = [0usize; 3];
        for _ in 0..draws {
            let r = draw_offset(&mut src, &[-1, 0, 1]).unwrap();
            hist[(r + 1) as usize] += 1;
        }
        let mean = draws as f64 / 3.0;
        let sigma = libm::sqrt(draws as f64 * (1.0 / 3.0) * (2.0 / 3.0));
        for count in hist {
            assert!(
                libm::fabs(count as f64 - mean) <= 3.0 * sigma,
                "{hist:?} outside 3 sigma"
            );
        }
    }

    #[test]
    fn equal_seeds_equal_streams() {
        let mut a = SeededSource::new(42);
        let mut b = SeededSource::new(42);
        for i in 0..1000 {
            let f = feasible_offsets(i % 7 + 1, 7).unwrap();
            assert_eq!(a.draw(f), b.draw(f));
        }
    }
}
