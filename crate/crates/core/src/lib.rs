//! Stable-law approximation of call expectations for normalized heavy-tailed sums, the
//! explicit error bounds that go with it, and numerical checks of the Stein-method
//! machinery behind those bounds.

pub mod attraction;
pub mod batch;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod quadrature;
pub mod rng;
pub mod stable;
pub mod stats;
pub mod stein;

pub use error::{Error, Result};
