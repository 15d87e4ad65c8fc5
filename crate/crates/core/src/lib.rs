//! A seedable cellular-automaton model of fluid flow on a rectangular lattice.
//!
//! Molecules enter through row 1, and on every step each molecule tries to
//! advance one row, drifting one column left, right, or straight ahead at
//! random. A molecule whose destination is an obstacle, or already holds `d`
//! molecules, stays in its row and shifts sideways instead. Rows are swept
//! from the material front back toward the inflow row with a carry buffer,
//! so sideways moves in row `i` constrain advancement out of row `i - 1`
//! within the same step.
//!
//! This crate is `no_std` (it needs `alloc`) and holds the model, the step
//! engine and run statistics. File formats, rendering and the command-line
//! driver live in the `flowca` crate.
//!
//! All row and column indices in the public API are 1-based.
//!
//! ```
//! use flowca_core::{run, InflowPattern, Rect, SimConfig};
//!
//! let config = SimConfig {
//!     rows: 20,
//!     cols: 20,
//!     steps: 50,
//!     capacity: 3,
//!     seed: 7,
//!     inflow: InflowPattern::single(20),
//!     obstacles: vec![Rect::new(12, 8, 12, 17)],
//! };
//! let history = run(&config).unwrap();
//! assert_eq!(history.frames().len(), 51);
//! ```
#![no_std]

extern crate alloc;

mod config;
mod engine;
mod grid;
mod offset;
pub mod stats;

pub use config::{validate, ConfigError, InflowPattern, Rect, SimConfig, ValidationErrors};
pub use engine::{
    front_row, run, run_observed, run_with_source, step, step_observed, EngineError, History,
    NoopObserver, RunError, StepLedger, StepObserver,
};
pub use grid::{GridState, ObstacleMask};
pub use offset::{
    draw_offset, feasible_offsets, OffsetError, OffsetSource, ScriptedSource, SeededSource,
};
pub use stats::{
    compute_stats, log_fit, spearman_rho, sweep_capacity, FitError, LogFit, RunStats, SweepError,
    SweepRow,
};
