//! Command-line front end for `primon-core`.
//!
//! [`app::run`] parses arguments, resolves a [`config::RunConfig`] and writes
//! one report per invocation. Exit codes: 0 when every checked criterion
//! holds, 1 on a criterion failure, 2 on an operational error.

pub mod app;
pub mod config;
pub mod report;
pub mod table1;

pub use app::run;
