//! Batch harness for the `emhd1d` laboratory.
//!
//! The binary is the artifact's only user-facing surface: it evolves run
//! configurations into self-describing output directories, re-measures the
//! library's invariants on demand, executes Cartesian parameter sweeps, and
//! exposes the three focused labs (iteration contraction, truncated
//! coefficient ODE, profile collapse).
//!
//! # Exit-code contract
//!
//! | code | meaning |
//! |------|---------|
//! | 0    | completed normally; for `verify`, every check passed |
//! | 1    | `verify` ran but at least one check failed |
//! | 2    | usage or configuration error |
//! | 3    | numeric failure (NaN abort) |
//! | 10   | scientific finding: a blow-up threshold fired or resolution was lost |
//!
//! A finding is deliberately distinct from a failure so sweeps can tell
//! interesting physics from crashed cells.
//!
//! # Determinism
//!
//! Identical configuration (including the seed embedded in the init preset)
//! produces byte-identical data outputs — series, checkpoints, summaries
//! and verdicts. The manifest is identical except for its two wall-time
//! fields (`started_unix`, `finished_unix`).

pub mod config;
pub mod labs;
pub mod runner;
pub mod sweep;
pub mod verify;

/// Completed normally / all checks passed.
pub const EXIT_OK: i32 = 0;
/// At least one verification check failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Usage or configuration error.
pub const EXIT_USAGE: i32 = 2;
/// Numeric failure: the state stopped being finite.
pub const EXIT_NAN: i32 = 3;
/// Scientific finding: blow-up stop or resolution loss.
pub const EXIT_FINDING: i32 = 10;
