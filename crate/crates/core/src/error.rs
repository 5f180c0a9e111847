use thiserror::Error;

/// Errors raised by the radius laboratory.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("bracket error: series({lo}) = {f_lo} and series({hi}) = {f_hi} do not straddle target {target}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
        target: f64,
    },

    #[error("bisection did not converge after {iterations} iterations (bracket width {width:e})")]
    NonConvergence { iterations: usize, width: f64 },

    #[error("budget exceeded: {what} needs {needed}, cap is {cap}")]
    Budget { what: &'static str, needed: u128, cap: u128 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("commutation violated: ||T{i} T{j} - T{j} T{i}|| = {norm:e} exceeds {allowed:e}")]
    Commutation { i: usize, j: usize, norm: f64, allowed: f64 },

    #[error("contraction violated: ||T{index}|| = {norm} exceeds {allowed}")]
    NotContraction { index: usize, norm: f64, allowed: f64 },

    #[error("invalid colligation: {0}")]
    Colligation(String),

    #[error("inconsistent bounds for {quantity} at d = {d}: lower {lower} ({lower_method}) > upper {upper} ({upper_method})")]
    Consistency {
        d: usize,
        quantity: String,
        lower: f64,
        lower_method: String,
        upper: f64,
        upper_method: String,
    },

    #[error("invalid input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

impl LabError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        LabError::Domain(msg.into())
    }

    /// True for errors that signal a broken mathematical invariant rather
    /// than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, LabError::Consistency { .. })
    }
}
