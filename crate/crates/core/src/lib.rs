//! Simulator and solvers for digital-twin-assisted task offloading over
//! in-network computing nodes and an edge server.

pub mod baselines;
pub mod channel;
pub mod compute;
pub mod config;
pub mod error;
pub mod game;
pub mod harness;
pub mod marl;
pub mod ofmo;
pub mod requests;
pub mod rng;

pub use config::{load_config, validate_config, ScenarioConfig};
pub use error::{ConfigError, ModelError, RunError};
