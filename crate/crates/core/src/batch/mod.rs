//! The batched engine: dense layout, uniform grid broadphase and data-parallel
//! kernels, producing the same labels as the sequential engine.

mod engine;
mod grid;
mod kernels;
mod layout;

pub use engine::{BatchConfig, BatchEngine, LabelBuffer};
pub use grid::{Cell, SpatialGrid, DEFAULT_CELL_CAPACITY};
pub use kernels::{batch_over, batch_under};
pub use layout::BatchLayout;
