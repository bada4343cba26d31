use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {0} out of range 1..=4")]
    IndexOutOfRange(usize),

    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),

    #[error("tensor is not trace-free (trace norm {trace_norm:.3e})")]
    NotTraceFree { trace_norm: f64 },

    #[error("unsupported dimension n = {n}: {what}")]
    UnsupportedDimension { n: usize, what: &'static str },

    #[error("requires a minimal hypersurface point (|H| = {h:.3e})")]
    NotMinimal { h: f64 },

    #[error("missing data: {0}")]
    MissingData(&'static str),

    #[error("derivative data inconsistent with Simons' identity (defect {defect:.3e})")]
    InconsistentDerivatives { defect: f64 },

    #[error(
        "negative discriminant {disc:.6e}: need 32 pi^2 chi/(3 Vol) + 2 A >= 68 c^2/9"
    )]
    NegativeDiscriminant { disc: f64 },

    #[error("Euler characteristic {0} is odd; closed hypersurfaces of this kind have even chi")]
    OddEuler(i64),

    #[error("degenerate chart Jacobian (condition number {condition:.3e})")]
    DegenerateChart { condition: f64 },

    #[error("chart point is off the unit sphere by {defect:.3e}")]
    OffSphere { defect: f64 },

    #[error("unknown immersion kind `{0}`")]
    UnknownKind(String),
}

pub type Result<T> = std::result::Result<T, Error>;
