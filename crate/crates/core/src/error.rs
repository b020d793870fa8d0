use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied argument is malformed (wrong shape, out of range, bad axis).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The arguments are well formed but the requested quantity is undefined,
    /// e.g. conditioning on a zero-probability event.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exhaustive computation would exceed its enumeration cap.
    #[error("size cap exceeded: {what} needs {needed}, cap is {cap}")]
    Size { what: String, needed: u128, cap: u128 },

    /// Protocol parameters violate their invariants.
    #[error("invalid protocol parameters: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

pub(crate) fn size_check(what: &str, needed: u128, cap: u128) -> Result<()> {
    if needed > cap {
        Err(Error::Size {
            what: what.to_string(),
            needed,
            cap,
        })
    } else {
        Ok(())
    }
}
