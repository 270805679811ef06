//! Team assembly in a two-culture research institution.
//!
//! Collaboration networks grow one team per tick from per-culture assembly
//! rules (team size, incumbent share, repeat collaboration) plus a
//! cross-culture mixing probability. The crate also computes the network
//! observables, calibrates the rules from co-authorship records and runs
//! replicated mixing sweeps.

pub mod calibration;
pub mod config;
pub mod engine;
pub mod export;
pub mod fixtures;
pub mod graph;
pub mod metrics;
pub mod rng;
pub mod runner;
pub mod types;

pub use engine::{run, SimState, Team};
pub use graph::{Agent, CollabGraph};
pub use metrics::MetricsRow;
pub use rng::RngStream;
pub use types::{validate_params, AgentId, Culture, CultureParams, ModelParams, ParamErrors, PerCulture};
