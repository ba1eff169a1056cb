use thiserror::Error;

/// Errors raised by layout construction, derivation, simulation and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("code distance must be at least 1, got {0}")]
    InvalidDistance(usize),

    #[error("trajectory has {got_x} X bits and {got_z} Z bits, layout expects {want_x} and {want_z}")]
    TrajectoryLength {
        got_x: usize,
        got_z: usize,
        want_x: usize,
        want_z: usize,
    },

    #[error("cannot parse trajectory {0:?}")]
    TrajectoryParse(String),

    #[error("no basis string satisfies the Z parities of this trajectory")]
    InconsistentTrajectory,

    #[error("both logical amplitudes vanish for this rotation")]
    ZeroState,

    #[error("trajectory has probability {0:e} for this rotation")]
    ImpossibleTrajectory(f64),

    #[error("{what} exceeds the size guard ({size} > {limit})")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("no candidate beats the residual threshold {0:e}")]
    EmptyResult(f64),

    #[error("operation requires a rotated layout")]
    UnsupportedLayout,

    #[error("statistics table is empty")]
    EmptyStats,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
