//! Density images, heightfield CSV and ASCII previews of single frames.
//!
//! Every output draws row 1 (the inflow side) at the bottom.

use std::fmt::Write as _;

use flowca_core::{GridState, ObstacleMask};

/// Count at which the blue ramp saturates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Saturation {
    /// The largest count in the frame, or 1 for an empty frame.
    #[default]
    Auto,
    Fixed(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ImageSpec {
    pub saturation: Saturation,
}

impl ImageSpec {
    pub fn fixed(saturation: u32) -> Self {
        assert!(saturation >= 1, "saturation must be ≥ 1");
        Self {
            saturation: Saturation::Fixed(saturation),
        }
    }
}

const OBSTACLE_RGB: [u8; 3] = [0, 0, 0];

/// Colour of a free cell holding `count` molecules: white when empty, then
/// a linear ramp from white toward pure blue, clipped at `saturation`.
pub fn density_rgb(count: u32, saturation: u32) -> [u8; 3] {
    let s = u64::from(saturation.max(1));
    let c = u64::from(count).min(s);
    // round(255·c/s), halves rounding up
    let shade = (2 * 255 * c + s) / (2 * s);
    let v = (255 - shade) as u8;
    [v, v, 255]
}

/// Binary P6 pixmap, one pixel per cell, `cols` wide and `rows` high.
pub fn density_image(frame: &GridState, mask: &ObstacleMask, spec: ImageSpec) -> Vec<u8> {
    let (rows, cols) = (frame.rows(), frame.cols());
    assert_eq!((mask.rows(), mask.cols()), (rows, cols), "frame/mask mismatch");
    let saturation = match spec.saturation {
        Saturation::Auto => frame.max_count().max(1),
        Saturation::Fixed(s) => s.max(1),
    };
    let header = format!("P6\n{cols} {rows}\n255\n");
    let mut out = Vec::with_capacity(header.len() + 3 * rows * cols);
    out.extend_from_slice(header.as_bytes());
    for row in (1..=rows).rev() {
        for (&count, &blocked) in frame.row(row).iter().zip(mask.row(row)) {
            let rgb = if blocked {
                OBSTACLE_RGB
            } else {
                density_rgb(count, saturation)
            };
            out.extend_from_slice(&rgb);
        }
    }
    out
}

/// One line per row, row 1 first, counts separated by commas; obstacles are `-1`.
pub fn heightfield_csv(frame: &GridState, mask: &ObstacleMask) -> String {
    let mut out = String::with_capacity(frame.rows() * frame.cols() * 2);
    for row in 1..=frame.rows() {
        write_row(&mut out, frame.row(row), mask.row(row), ',');
        out.push('\n');
    }
    out
}

pub(crate) fn write_row(out: &mut String, counts: &[u32], blocked: &[bool], sep: char) {
    for (j, (&count, &b)) in counts.iter().zip(blocked).enumerate() {
        if j > 0 {
            out.push(sep);
        }
        if b {
            out.push_str("-1");
        } else {
            write!(out, "{count}").unwrap();
        }
    }
}

/// One character per cell, row 1 printed last: `.` empty, `#` obstacle,
/// `1`-`9` counts, `+` above nine.
pub fn ascii_preview(frame: &GridState, mask: &ObstacleMask) -> String {
    let mut lines = Vec::with_capacity(frame.rows());
    for row in (1..=frame.rows()).rev() {
        let line: String = frame
            .row(row)
            .iter()
            .zip(mask.row(row))
            .map(|(&count, &blocked)| match (blocked, count) {
                (true, _) => '#',
                (false, 0) => '.',
                (false, c @ 1..=9) => char::from_digit(c, 10).unwrap(),
                (false, _) => '+',
            })
            .collect();
        lines.push(line);
    }
    lines.join("\n")
}
