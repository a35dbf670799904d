//! Tube categories of fusion categories, their representation theory and the
//! Drinfeld center, plus a small symmetric MPO toolkit.

pub mod bundled;
pub mod center;
pub mod error;
pub mod fusion;
pub mod homspace;
pub mod linalg;
pub mod mpo;
pub mod pipeline;
pub mod report;
pub mod tube;

pub use error::{Error, Result};
pub use fusion::{load_spec, parse_spec, quantum_dimensions, validate_pentagon, CategorySpec};
