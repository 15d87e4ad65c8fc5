//! Text formats: run configs, history files and heightfield frames.

mod config;
mod history;

pub use config::{parse_config, write_config, ConfigErrors, ConfigIssue, Diagnostic};
pub use history::{
    parse_frame_csv, read_history, write_frames, write_history, FormatError, StoredHistory,
};
