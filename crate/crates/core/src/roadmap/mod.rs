//! Roadmap graphs, validity states, PRM construction, the exact collision
//! oracle and roadmap files.

mod graph;
mod oracle;
mod persist;
mod prm;

pub use graph::{
    ComponentId, ComponentKind, ObstacleId, Roadmap, RoadmapBundle, RoadmapGeometry, Scene, ValidityState,
};
pub use oracle::{exact_component_valid, ExactOracle, ObstacleSolid};
pub use persist::{decode_roadmap, encode_roadmap, load_roadmap, save_roadmap, FORMAT_VERSION, MAGIC};
pub use prm::{build_prm, PrmParams};
