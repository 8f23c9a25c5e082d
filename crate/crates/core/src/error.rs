use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero input: {0}")]
    ZeroInput(&'static str),
    #[error("factorization budget exceeded on {n} (trial bound {budget})")]
    FactorBudget { n: String, budget: u64 },
    #[error("degree {deg} exceeds polynomial degree cap {cap}")]
    DegreeCap { deg: usize, cap: usize },
    #[error("not specializable at x = {at} (zero or pole in a symbol entry)")]
    NotSpecializable { at: String },
    #[error("class is trivial; genus of the split class is not defined")]
    TrivialClass,
    #[error("not certified index 2: {0}")]
    NotIndexTwo(String),
    #[error("split-point search cap exceeded at p = {p}; input not in normal form?")]
    SplitPointCap { p: String },
    #[error("p-adic precision cap exceeded in {0}; this indicates an internal bug")]
    PrecisionCap(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("curve is not split (a^2 - 4b is not a perfect square): {0}")]
    NotSplitCurve(String),
    #[error("inconsistent Mordell-Weil data: {0}")]
    InconsistentMw(String),
    #[error("cannot decide: {0}")]
    CannotDecide(String),
    #[error("internal diagnostic: {0}")]
    Diagnostic(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Errors that stem from a configured resource budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::FactorBudget { .. }
                | Error::DegreeCap { .. }
                | Error::SplitPointCap { .. }
                | Error::PrecisionCap(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
