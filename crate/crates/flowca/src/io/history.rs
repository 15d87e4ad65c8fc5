//! History files and single-frame text.
//!
//! A history file is a header line `rows cols frames`, then each frame
//! preceded by one blank line, each frame being `rows` lines of `cols`
//! space-separated integers, row 1 first. Obstacle cells are written as `-1`.
//!
//! ```text
//! 2 2 1
//!
//! 0 0
//! 0 0
//! ```
//!
//! Reading is strict (LF only, single spaces, canonical integers) so that
//! reading then writing reproduces the input byte for byte.

use flowca_core::{GridState, History, ObstacleMask};
use thiserror::Error;

use crate::render::write_row;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: expected blank separator line before frame {frame}")]
    MissingSeparator { line: usize, frame: usize },
    #[error("line {line}: frame {frame} is short: expected {expected} rows")]
    ShortFrame {
        line: usize,
        frame: usize,
        expected: usize,
    },
    #[error("line {line}: expected {expected} values, found {found}")]
    RowLength {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: `{token}` is not an integer")]
    NonInteger { line: usize, token: String },
    #[error("line {line}: count {value} below -1")]
    BelowSentinel { line: usize, value: i64 },
    #[error("line {line}: count {value} too large")]
    Overflow { line: usize, value: i64 },
    #[error("frame count mismatch: header says {declared}, body has {found}")]
    FrameCountMismatch { declared: usize, found: usize },
    #[error("line {line}: obstacle layout differs from frame 0")]
    ObstacleLayoutChanged { line: usize },
    #[error("missing final newline")]
    MissingFinalNewline,
}

/// Frames read back from a history file. Obstacles come from the `-1`
/// cells, which must be identical in every frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredHistory {
    pub rows: usize,
    pub cols: usize,
    pub mask: ObstacleMask,
    pub frames: Vec<GridState>,
}

pub fn write_history(history: &History) -> String {
    let config = history.config();
    write_frames(config.rows, config.cols, history.mask(), history.frames())
}

pub fn write_frames(rows: usize, cols: usize, mask: &ObstacleMask, frames: &[GridState]) -> String {
    let mut out = String::with_capacity(16 + frames.len() * rows * (cols * 2 + 1));
    out.push_str(&format!("{rows} {cols} {}\n", frames.len()));
    for frame in frames {
        assert_eq!((frame.rows(), frame.cols()), (rows, cols), "frame dimensions");
        out.push('\n');
        for row in 1..=rows {
            write_row(&mut out, frame.row(row), mask.row(row), ' ');
            out.push('\n');
        }
    }
    out
}

impl StoredHistory {
    pub fn to_text(&self) -> String {
        write_frames(self.rows, self.cols, &self.mask, &self.frames)
    }
}

fn parse_canonical(token: &str, line: usize) -> Result<i64, FormatError> {
    let non_integer = || FormatError::NonInteger {
        line,
        token: token.to_string(),
    };
    let value: i64 = token.parse().map_err(|_| non_integer())?;
    if value.to_string() != token {
        return Err(non_integer());
    }
    Ok(value)
}

/// Parses one row of `cols` values separated by exactly one `sep`.
fn parse_row(
    text: &str,
    line: usize,
    cols: usize,
    sep: char,
    counts: &mut Vec<u32>,
    blocked: &mut Vec<bool>,
) -> Result<(), FormatError> {
    let tokens: Vec<&str> = text.split(sep).collect();
    if tokens.len() != cols {
        return Err(FormatError::RowLength {
            line,
            expected: cols,
            found: tokens.len(),
        });
    }
    for token in tokens {
        let value = parse_canonical(token, line)?;
        match value {
            -1 => {
                counts.push(0);
                blocked.push(true);
            }
            v if v < -1 => return Err(FormatError::BelowSentinel { line, value: v }),
            v => {
                let c = u32::try_from(v).map_err(|_| FormatError::Overflow { line, value: v })?;
                counts.push(c);
                blocked.push(false);
            }
        }
    }
    Ok(())
}

/// Reads a history file written by [`write_history`].
pub fn read_history(text: &str) -> Result<StoredHistory, FormatError> {
    let body = text
        .strip_suffix('\n')
        .ok_or(FormatError::MissingFinalNewline)?;
    let mut lines = body.split('\n').enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines.next().expect("split yields at least one item");
    let header_err = |reason: &str| FormatError::MalformedHeader {
        line: 1,
        reason: reason.to_string(),
    };
    let dims: Vec<&str> = header.split(' ').collect();
    let [rows, cols, declared] = dims[..] else {
        return Err(header_err("expected `rows cols frames`"));
    };
    let parse_dim = |t: &str| -> Result<usize, FormatError> {
        let v = parse_canonical(t, 1).map_err(|_| header_err("non-integer dimension"))?;
        usize::try_from(v).map_err(|_| header_err("negative dimension"))
    };
    let (rows, cols, declared) = (parse_dim(rows)?, parse_dim(cols)?, parse_dim(declared)?);
    if rows == 0 || cols == 0 {
        return Err(header_err("dimensions must be ≥ 1"));
    }

    let mut frames = Vec::new();
    let mut mask: Option<ObstacleMask> = None;
    while let Some((line, sep)) = lines.next() {
        if !sep.is_empty() {
            return Err(FormatError::MissingSeparator {
                line,
                frame: frames.len(),
            });
        }
        let mut counts = Vec::with_capacity(rows * cols);
        let mut blocked = Vec::with_capacity(rows * cols);
        let mut last_line = line;
        for _ in 0..rows {
            let Some((line, text)) = lines.next() else {
                return Err(FormatError::ShortFrame {
                    line: last_line + 1,
                    frame: frames.len(),
                    expected: rows,
                });
            };
            if text.is_empty() {
                return Err(FormatError::ShortFrame {
                    line,
                    frame: frames.len(),
                    expected: rows,
                });
            }
            parse_row(text, line, cols, ' ', &mut counts, &mut blocked)?;
            last_line = line;
        }
        let frame_mask = ObstacleMask::from_blocked(rows, cols, blocked).expect("sized above");
        match &mask {
            None => mask = Some(frame_mask),
            Some(m) if *m != frame_mask => {
                return Err(FormatError::ObstacleLayoutChanged { line: line + 1 })
            }
            Some(_) => {}
        }
        frames.push(GridState::from_counts(rows, cols, counts).expect("sized above"));
    }
    if frames.len() != declared {
        return Err(FormatError::FrameCountMismatch {
            declared,
            found: frames.len(),
        });
    }
    Ok(StoredHistory {
        rows,
        cols,
        mask: mask.unwrap_or_else(|| ObstacleMask::clear(rows, cols)),
        frames,
    })
}

/// Parses a heightfield CSV (as written by [`crate::render::heightfield_csv`])
/// into its frame and obstacle mask.
pub fn parse_frame_csv(text: &str) -> Result<(GridState, ObstacleMask), FormatError> {
    let body = text
        .strip_suffix('\n')
        .ok_or(FormatError::MissingFinalNewline)?;
    let lines: Vec<&str> = body.split('\n').collect();
    let cols = lines[0].split(',').count();
    let rows = lines.len();
    let mut counts = Vec::with_capacity(rows * cols);
    let mut blocked = Vec::with_capacity(rows * cols);
    for (i, text) in lines.iter().enumerate() {
        parse_row(text, i + 1, cols, ',', &mut counts, &mut blocked)?;
    }
    Ok((
        GridState::from_counts(rows, cols, counts).expect("sized above"),
        ObstacleMask::from_blocked(rows, cols, blocked).expect("sized above"),
    ))
}
