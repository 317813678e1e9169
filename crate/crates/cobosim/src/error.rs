//! One error type for the whole crate; the CLI maps variant classes to exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode count mismatch: {left} vs {right}")]
    ModeMismatch { left: usize, right: usize },
    #[error("occupation list is empty")]
    NoModes,
    #[error("occupation {occ} exceeds the supported maximum {max}")]
    OccupationOverflow { occ: u64, max: u32 },
    #[error("block needs at least one state")]
    EmptyBlock,
    #[error("closure needs at least one seed state")]
    NoSeeds,
    #[error("invariant block exceeds the dimension cap {cap}")]
    BlockTooLarge { cap: usize },
    #[error("state |{state}⟩ is not in the block")]
    StateOutsideBlock { state: String },
    #[error("coupler maps |{from}⟩ to |{to}⟩ outside the block")]
    NotClosed { from: String, to: String },
    #[error("{amps} amplitudes for a block of dimension {dim}")]
    DimensionMismatch { amps: usize, dim: usize },
    #[error("state has squared norm {norm2:e}, expected 1")]
    NotNormalized { norm2: f64 },
    #[error("cannot normalize a zero state")]
    ZeroState,
    #[error("states live on different blocks")]
    BlockMismatch,
    #[error("coupler term has zero coefficient")]
    ZeroCoefficient,
    #[error("coupler term must move at least one quantum")]
    EmptyMonomial,
    #[error("coupler needs at least one term")]
    EmptyCoupler,
    #[error("operator is not Hermitian within tolerance")]
    NotHermitian,
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("excited-atom count {0} exceeds the two-atom maximum 2")]
    ExcitedOutOfRange(u8),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("unknown preset {0:?}; valid presets: hom4, nboson, general, shifted, threemode, dicke, perturbed")]
    UnknownPreset(String),
    #[error("unknown command {0:?}; valid commands: eigen, trace, null, state")]
    UnknownCommand(String),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code class: 2 validation, 3 capacity, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BlockTooLarge { .. } | Error::OccupationOverflow { .. } => 3,
            Error::Io(_) => 4,
            _ => 2,
        }
    }
}
