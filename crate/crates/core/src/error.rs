use thiserror::Error;

/// Errors produced by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("level {n} exceeds the configured guard {guard}")]
    LevelTooLarge { n: u64, guard: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty code")]
    EmptyCode,

    #[error("code {0} does not translate to a single continued-fraction cylinder")]
    Untranslatable(String),

    #[error("insufficient depth: {0}")]
    InsufficientDepth(String),

    #[error("exact arithmetic overflowed machine integers")]
    Overflow,

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Size limits for the enumerating operations.
///
/// `enumeration` bounds anything that materialises `2^n` intervals,
/// `exact` bounds rational sums over `2^(n-1)` terms and `float` bounds the
/// streaming compensated sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guards {
    pub enumeration: u32,
    pub exact: u32,
    pub float: u32,
}

pub const DEFAULT_ENUMERATION_GUARD: u32 = 30;
pub const DEFAULT_EXACT_GUARD: u32 = 25;
pub const DEFAULT_FLOAT_GUARD: u32 = 36;

impl Default for Guards {
    fn default() -> Self {
        Self {
            enumeration: DEFAULT_ENUMERATION_GUARD,
            exact: DEFAULT_EXACT_GUARD,
            float: DEFAULT_FLOAT_GUARD,
        }
    }
}

pub(crate) fn check_guard(n: u32, guard: u32) -> Result<()> {
    if n > guard {
        Err(Error::LevelTooLarge {
            n: n as u64,
            guard: guard as u64,
        })
    } else {
        Ok(())
    }
}
