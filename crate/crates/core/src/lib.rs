//! Weighted random permutations with cycle weights `θ_m = m^γ`.

pub mod asymptotics;
pub mod cycle_type;
pub mod error;
pub mod experiments;
pub mod lattice;
pub mod order;
pub mod partition;
pub mod rng;
pub mod sampler;
pub mod special;
pub mod weights;

pub use error::{Error, Result};

/// Version stamped into every CSV/JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;
