//! Red-green-gray validity maintenance for precomputed motion-planning
//! roadmaps under moving obstacles.

pub mod batch;
pub mod error;
pub mod geometry;
pub mod rgg;
pub mod roadmap;
pub mod swept;

pub use error::{Error, Result};
