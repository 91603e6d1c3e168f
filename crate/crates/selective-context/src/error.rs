//! Error type shared across the crate.

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied value was out of range, empty, or inconsistent.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A scoring backend failed while handling the given byte range of the input.
    #[error("scoring failed for bytes {start}..{end}: {message}")]
    Scoring {
        start: usize,
        end: usize,
        message: String,
    },

    /// A remote request gave up after the configured number of attempts.
    #[error("remote scoring failed after {attempts} attempt(s): {message}")]
    Remote { message: String, attempts: u32 },

    /// The remote server answered, but the payload breaks the scoring
    /// contract (malformed body, missing fields, uncovered tokens).
    #[error("remote response violates the scoring contract: {0}")]
    RemoteContract(String),

    /// A remote sub-token's byte range straddles two caller tokens, so its
    /// log probability cannot be assigned without dropping or double-counting.
    #[error("sub-token at bytes {start}..{end} straddles caller token boundaries")]
    MisalignedOffsets { start: usize, end: usize },

    /// Paired per-token inputs disagree (lengths or spans); `index` is the
    /// first position where they diverge.
    #[error("misaligned inputs at index {index}: {message}")]
    MisalignedInput { index: usize, message: String },

    /// A model file is malformed or has an unsupported magic/version.
    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
