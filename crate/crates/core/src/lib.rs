//! Numerical laboratory for interval maps with indifferent fixed points.

pub mod entrance;
pub mod error;
pub mod experiments;
pub mod invariant;
pub mod maps;
pub mod orbitstats;
pub mod quad;
pub mod report;
pub mod sampling;
pub mod roots;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
