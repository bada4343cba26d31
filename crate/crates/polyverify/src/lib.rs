//! Exact certification of curvature identities for hypersurfaces with
//! diagonal shape operator, as zero tests of rational polynomials.

pub mod poly;
pub mod recipe;
pub mod registry;
pub mod tensor;

pub use poly::{q, RationalPoly};
pub use recipe::assemble_symbolic;
pub use registry::{diagnostics, registry, verify_all, verify_identity, Status, Verification, Witness};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unsupported recipe pattern `{0}`")]
    UnsupportedPattern(String),
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("dimension {n}: {what}")]
    Dimension { n: usize, what: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
