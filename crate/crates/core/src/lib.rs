//! Extrinsic curvature of hypersurfaces `M^n ⊂ N^{n+1}(c)` with emphasis on
//! `n = 4`: Λ² algebra, Weyl decomposition from the second fundamental form,
//! pointwise classification, global bounds and quadrature over catalog
//! immersions.
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod classify;
pub mod error;
pub mod extrinsic;
pub mod immersions;
pub mod lambda2;
pub mod serde_rows;

pub use error::{Error, Result};
pub use extrinsic::PointState;
pub use lambda2::{CurvTensor4, Part, TwoForm};
