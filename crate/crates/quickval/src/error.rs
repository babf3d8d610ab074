use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Symbol expansion hit the depth cap before resolving. The cap is an
    /// error rather than a silent truncation because a truncated expansion
    /// would understate comparison costs.
    #[error("expansion cap: the first {0} symbols do not resolve the operation")]
    ExpansionCap(usize),

    /// `beta(u, u)` is undefined: identical keys never stop comparing.
    #[error("identical keys: comparison cost is undefined for u = v = {0}")]
    IdenticalKeys(f64),

    /// A pivot seed coincided with the search quantile exactly. Measure-zero
    /// event; the caller is expected to redraw the replication stream.
    #[error("pivot hits alpha = {0} exactly; redraw the replication stream")]
    PivotHitsAlpha(f64),

    /// A declared tameness parameter does not meet a precondition.
    #[error("tameness precondition: {0}")]
    Tameness(String),

    /// A hard cap was exceeded instead of converging.
    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    /// A truncated computation failed to converge.
    #[error("truncation not converging: {0}")]
    NonConvergent(String),

    /// A numerical self-check (two routes to one value) disagreed.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI maps this error to.
    ///
    /// 1 = usage / domain, 2 = numerical precondition, 3 = internal cap.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Domain(_) | Error::Io(_) | Error::Json(_) => 1,
            Error::Tameness(_)
            | Error::IdenticalKeys(_)
            | Error::PivotHitsAlpha(_)
            | Error::Verification(_) => 2,
            Error::ExpansionCap(_) | Error::CapExceeded(_) | Error::NonConvergent(_) => 3,
        }
    }
}
