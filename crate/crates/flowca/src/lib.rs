//! File formats, rendering, sweeps and the command-line driver for the
//! `flowca-core` cellular-automaton fluid model.

pub mod bench;
pub mod cli;
pub mod io;
pub mod render;
pub mod sweep;
