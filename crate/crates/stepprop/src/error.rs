use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at z = {0}")]
    GammaPole(String),
    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("x = {0} lies within the pole guard of the potential")]
    Singularity(String),
    #[error("operation not supported for the {0} family")]
    Unsupported(&'static str),
    #[error("energy {0} is a branch-degenerate point")]
    BranchDegenerate(String),
    #[error("branch jump detected during continuation: {0}")]
    BranchJump(String),
    #[error("Van Vleck factor diverges (|dT/dE| = {0:e})")]
    CausticDivergence(f64),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("root not bracketed; scanned T(E) table: {table:?}")]
    RootNotBracketed { table: Vec<(f64, f64)> },
    #[error("grid too coarse: packet momentum {momentum} exceeds Nyquist momentum {nyquist}")]
    GridTooCoarse { momentum: f64, nyquist: f64 },
    #[error("ODE step failure at t = {0}")]
    StepFailure(f64),
    #[error("configuration lies inside the caustic loop")]
    InsideCaustic,
    #[error("WKB invalid near caustic: |vv| = {0:e}")]
    CausticProximity(f64),
}

impl Error {
    /// True for failures of a numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::BranchJump(_)
                | Error::RootNotBracketed { .. }
                | Error::StepFailure(_)
                | Error::CausticDivergence(_)
                | Error::NoSolution(_)
                | Error::CausticProximity(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
