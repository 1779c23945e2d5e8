use thiserror::Error;

use crate::offspring::OffspringFamily;

/// Errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A corpus line could not be parsed into a tree.
    #[error("corpus line {line}: {reason}")]
    CorpusParse { line: usize, reason: String },

    /// A parameter was outside its legal range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// No offspring distribution of the given family has these moments.
    #[error("no {family} distribution has mean {mean} and variance {variance}")]
    InfeasibleMoments {
        family: OffspringFamily,
        mean: f64,
        variance: f64,
    },

    /// A generation's mean/variance pair is infeasible for its family.
    #[error(
        "generation {generation}: no {family} distribution has mean {mean} and variance {variance}"
    )]
    InfeasibleGeneration {
        generation: u32,
        family: OffspringFamily,
        mean: f64,
        variance: f64,
    },

    /// A pgf was evaluated outside its domain.
    #[error("pgf argument {0} is outside [0, 1]")]
    PgfArgument(f64),

    /// The mean structure does not certify an almost-surely finite tree.
    #[error("the mean structure does not certify finiteness; total moments may diverge")]
    FinitenessNotCertified,

    /// A truncated infinite sum did not reach the requested tolerance.
    #[error("truncation did not converge within {0} generations")]
    TruncationCap(u32),

    /// A simulation guard tripped, usually a sign of a non-finite model.
    #[error("simulation guard exceeded: {0}")]
    GuardExceeded(String),

    /// An error raised while generating one replicate of an ensemble.
    #[error("replicate {replicate}: {source}")]
    InReplicate {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    /// An operation that needs data received none.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Every optimizer start was infeasible.
    #[error("no feasible starting point found for the optimizer")]
    NoFeasibleStart,

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("model file error: {0}")]
    ModelFile(#[from] serde_json::Error),
}

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
