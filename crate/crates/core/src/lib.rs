//! Maslov class of Lagrangian immersions in `C^n` and flat tori, computed
//! two ways: as the winding of `det²` of the Gauss map and as the integral
//! of the mean-curvature one-form `(1/π) i_H ω`.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod expr;
pub mod grassmannian;
pub mod immersion;
pub mod linalg;
pub mod maslov;
pub mod metric;
pub mod random;
pub mod symplectic;

pub use error::{Error, Result};
pub use grassmannian::{maslov_map, LagrangianFrame, PlanePath};
pub use immersion::{Domain, Immersion, JetSource, LoopPath, ShapeRegistry, ShapeSpec};
pub use maslov::{MaslovReport, Status};
pub use symplectic::{AmbientSpace, RealVector};
