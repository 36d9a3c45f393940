use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("modulus {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("x^2 + {rho} is reducible mod {q}: -{rho} is a quadratic residue")]
    ReducibleQuadratic { q: u64, rho: u64 },
    #[error("rho must lie in [1, q-1], got {0}")]
    RhoOutOfRange(u64),
    #[error("operation undefined at zero")]
    ZeroInput,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("modulus polynomial is not monic")]
    NotMonic,
    #[error("modulus polynomial has degree {0}, need at least {1}")]
    DegreeTooSmall(usize, usize),
    #[error("x^2 + {rho} does not divide f mod {q}")]
    QuadraticFactorMissing { q: u64, rho: u64 },
    #[error("smallness region has {size} members, not smaller than q = {q}")]
    RegionCoversField { size: u64, q: u64 },
    #[error("smallness table would hold {estimated} entries, above the cap {cap}")]
    TableTooLarge { estimated: u128, cap: u64 },
    #[error("region was built for modulus {region_q}, attack runs mod {q}")]
    RegionModulusMismatch { region_q: u64, q: u64 },
    #[error("region was built for root {region_root}, attack uses {alpha}")]
    RegionRootMismatch { region_root: u64, alpha: u64 },
    #[error("empty sample list")]
    NoSamples,
    #[error("sample {0} has a(x) outside R_q0")]
    SampleNotInRq0(usize),
    #[error("oracle budget of {0} calls exceeded")]
    BudgetExceeded(u64),
    #[error("invalid attack plan: {0}")]
    InvalidPlan(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no certifiably irreducible modulus found for c in [{first}, {last}]")]
    ForgeFailed { first: u64, last: u64 },
    #[error("{context}: {message}")]
    Format { context: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
