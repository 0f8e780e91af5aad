use crate::chars::Characteristic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("period matrix is not symmetric: max |tau_ij - tau_ji| = {0:e}")]
    Asymmetric(f64),

    #[error("imaginary part of period matrix is not positive definite: smallest eigenvalue {0:e}")]
    NotPositiveDefinite(f64),

    #[error("period matrix has non-finite entries")]
    NonFinite,

    #[error("lattice sum needs radius {needed} but the cap is {cap}")]
    TruncationCap { needed: u64, cap: u32 },

    #[error("invalid truncation policy: {0}")]
    InvalidPolicy(&'static str),

    #[error("repeated quadratic form")]
    RepeatedForm,

    #[error("forms do not constitute an Aronhold system")]
    NotAronhold,

    #[error("4-tuple is not an azygetic tuple of distinct odd forms")]
    NotAzygetic,

    #[error("characteristic {0} is not odd")]
    NotOdd(Characteristic),

    #[error("half-sum characteristics are not integral")]
    NonIntegral,

    #[error("special locus: {} even theta constant(s) vanish", .0.len())]
    SpecialLocus(Vec<Characteristic>),

    #[error("singular linear system: {0}")]
    Singular(&'static str),

    #[error("inconsistent linear system: relative residual {0:e}")]
    Inconsistent(f64),

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("index {index} out of range (0..{len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("malformed input: {0}")]
    Json(String),

    #[error("no admissible period matrix after {tries} draws (seed {seed})")]
    Exhausted { seed: u64, tries: usize },
}
