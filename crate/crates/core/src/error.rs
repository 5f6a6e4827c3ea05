use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("invalid horizon: {0}")]
    InvalidHorizon(f64),

    #[error("invalid observation time {time} (must be finite, > 0 and <= horizon {horizon})")]
    InvalidTime { time: f64, horizon: f64 },

    #[error("incompatible horizons: {0} vs {1}")]
    IncompatibleHorizons(f64, f64),

    #[error("oracle requires uncensored data")]
    CensoredInOracle,

    #[error("degenerate variance: the variance estimate is zero")]
    DegenerateVariance,

    #[error("win ratio degenerate: p_hat = 1")]
    DegenerateWinRatio,

    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("no valid replicates: all {0} resampling replicates were degenerate")]
    NoValidReplicates(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bisection does not bracket the target: {0}")]
    NotBracketed(String),
}
