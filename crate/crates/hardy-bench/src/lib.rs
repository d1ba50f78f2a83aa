//! Command-line front end for the inequality verification engine.
//!
//! Four commands cover the workflows the engine supports:
//!
//! - `verify` — one inequality case, either through the radial engine or
//!   (with `--euclidean`) through the Cartesian full-gradient chain;
//! - `sweep` — an extremal family driven toward its sharp constant;
//! - `remainder` — the exact remainder identity on one case;
//! - `suite` — the full soundness battery plus the remainder battery.
//!
//! Reports are emitted as JSON or CSV with deterministic bytes: stable key
//! order, 17-significant-digit floats, and no timestamps unless `--timing`
//! is requested. Exit codes: `0` all checks passed, `1` the report could
//! not be written, `2` invalid configuration, `3` a check failed or a
//! numerical failure left a partial report.

pub mod config;
pub mod report;
pub mod run;
