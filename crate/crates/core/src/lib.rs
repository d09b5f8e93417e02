pub mod axioms;
pub mod chain;
pub mod complex;
pub mod cycles;
pub mod differential;
pub mod error;
pub mod flatten;
pub mod generator;
pub mod homology;
pub mod lattice;
pub mod linalg;
pub mod path;
pub mod reduce;
pub mod sample;
pub mod verify;
pub mod xaxis;

pub use error::{Error, Result};
