use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid masses: {0}")]
    Mass(String),
    #[error("iteration failed to converge: {0}")]
    Convergence(String),
    #[error("ordering constraint violated: {0}")]
    Order(String),
    #[error("singular configuration: {0}")]
    Singularity(String),
    #[error("state left the moving-frame chart: {0}")]
    Chart(String),
    #[error("eigenvalue classification failed: {0}")]
    Classification(String),
    #[error("linear spectrum is resonant: frequencies {0} and {1} within tolerance")]
    ResonantLinear(f64, f64),
    #[error("small divisor |k.w| = {divisor:e} on k = {kvec:?}")]
    SmallDivisor { kvec: Vec<i32>, divisor: f64 },
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("input outside admissible domain: {0}")]
    Domain(String),
    #[error("integrator step size underflow at t = {0}")]
    Stiffness(f64),
    #[error("orbit family collapsed onto the trivial branch (amplitude {0:e})")]
    FamilyCollapse(f64),
    #[error("continuation terminated: {0}")]
    ContinuationEnd(String),
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 1 numeric failure, 2 domain exclusion, 64 usage.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) => 2,
            Error::Usage(_) => 64,
            _ => 1,
        }
    }
}
