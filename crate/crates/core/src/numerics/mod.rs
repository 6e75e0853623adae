//! Shared numerical building blocks.

pub mod fd;
pub mod linalg;
pub mod quad;
