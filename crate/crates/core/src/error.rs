use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty point cloud")]
    EmptyPointCloud,
    #[error("degenerate polytope")]
    DegeneratePolytope,
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),
    #[error("non-finite input")]
    NonFinite,
    #[error("invalid transform: {0}")]
    InvalidTransform(String),
    #[error("invalid robot model: {0}")]
    InvalidRobot(String),
    #[error("configuration has {got} dofs, model expects {expected}")]
    DofMismatch { expected: usize, got: usize },
    #[error("discretization step must be positive, got {0}")]
    InvalidStep(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot build a tree from zero items")]
    EmptyTree,
    #[error("unknown obstacle id {0}")]
    UnknownObstacle(u32),
    #[error("spline with {segments} segments exceeds the layout cap of {cap}")]
    SplineOverflow { segments: usize, cap: usize },
    #[error("roadmap file has bad magic bytes")]
    BadMagic,
    #[error("roadmap file version {found} is not supported (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },
    #[error("roadmap file is truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },
    #[error("roadmap file checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("malformed roadmap file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
