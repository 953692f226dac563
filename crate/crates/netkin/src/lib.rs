//! File formats, experiments and the command line around `netkin-core`.
//!
//! Scenarios are JSON documents describing a network, its initial data and
//! boundary conditions; results are written as CSV with nine significant
//! digits. Three networks (tripod, diamond, single edge) are bundled.

pub mod error;
pub mod experiments;
pub mod output;
pub mod scenario;

pub use error::{Error, Result};
pub use scenario::{load_scenario, parse_coupling, parse_model, LoadedScenario, Overrides};
