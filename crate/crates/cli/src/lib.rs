//! Command-line sweep driver: value-list and config parsing, CSV/JSON
//! emission, and the `spectrum`, `states`, `measures` and `reconcile`
//! subcommands.

mod app;
pub mod emit;
pub mod parse;

pub use app::{exit_code, resolve, run, run_in, Format, Settings, EXIT_ALL_FAILED, EXIT_CONFIG, EXIT_OK, EXIT_PARTIAL};
