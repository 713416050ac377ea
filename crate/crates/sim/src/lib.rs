// SPDX-License-Identifier: Apache-2.0

//! Deterministic multi-node scenario runner for the DKG toolkit.
//!
//! [`scenario::run_scenario`] executes the whole phase machine for a
//! configured set of nodes (with optional adversarial behaviors) against
//! one bulletin board and produces a machine-readable report plus the
//! exportable event log. [`scenario::replay`] re-applies a log to a fresh
//! board and rebuilds the same report from public data alone.

pub mod log_io;
pub mod scenario;
pub mod vectors;

pub use log_io::{LogEntry, LogFile};
pub use scenario::{
    replay, run_scenario, Adversary, Behavior, ScenarioConfig, ScenarioError, ScenarioOutcome,
    ScenarioReport,
};
