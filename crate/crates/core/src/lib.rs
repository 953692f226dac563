//! Kinetic, half-moment and wave-equation solvers on networks of 1-D edges.
//!
//! Node coupling conditions for the macroscopic wave equation are obtained from
//! a kinetic redistribution rule `f^i(0, v) = Σ_j c_ij f^j(0, -v)` by analysing
//! the half-space (Milne) layer that forms next to each node. The crate holds
//! the pure numerics: layer solvers, node algebra, the three network solvers
//! and the entropy/mass diagnostics. It is `no_std` and only needs `alloc`;
//! file formats and the command line live in the `netkin` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod coupling;
pub mod diagnostics;
pub mod error;
pub mod halfmoment;
pub mod halfspace;
pub mod kinetic;
pub mod linalg;
mod math;
pub mod simulate;
pub mod state;
pub mod topology;
pub mod velocity;
pub mod wave;

pub use error::{Error, Result};
pub use state::{HalfMoments, MacroState};
pub use topology::{
    BoundaryCondition, Closure, CouplingKind, CouplingMatrix, EdgeEnd, InitialState, Model,
    Network, Scenario, VelocityModel,
};
pub use velocity::VelocityGrid;

/// Wave speed of the bounded-velocity model, `a = 1/sqrt(3)`.
pub const BOUNDED_WAVE_SPEED: f64 = 0.577_350_269_189_625_8;
