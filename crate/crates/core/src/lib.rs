pub mod cone;
pub mod drift;
pub mod error;
pub mod flow;
pub mod geom;
pub mod lawlor;
pub mod numerics;
pub mod poisson;
pub mod potential;

pub use error::{ErrorClass, LabError, Result};
