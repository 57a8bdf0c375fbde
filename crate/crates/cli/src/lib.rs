//! Library side of the `amfem` command-line tool.

pub mod commands;
pub mod config;
pub mod history;

pub use commands::{bench_list, cmd_compare, cmd_run, cmd_table, render_table, CommandError, HISTORY_FILE};
pub use config::{ConfigError, Mode, RunConfig, Settings};
pub use history::{read_history, write_history, HEADER};
