//! Geometry of rotationally symmetric warped products `[0, R) × N` with
//! metric `dr² + h(r)² g_N`, and numerical checks of isoperimetric and
//! monotonicity inequalities for submanifolds inside them.
//!
//! Everything is generic over a [`Real`] scalar (`f32` or `f64`); the `*64`
//! aliases at the crate root fix `f64`.

// negated float comparisons are how non-finite inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod error;
pub mod interp;
pub mod monotonic;
pub mod quadrature;
pub mod regions;
pub mod roots;
pub mod scalar;
pub mod submanifolds;
pub mod suite;
pub mod verifiers;
pub mod warping;

pub use error::{GeomError, Result};
pub use scalar::Real;
pub use monotonic::{AsymptoticReport, GrowthFit, MonotoneTrace};
pub use submanifolds::{GeometricMoments, SubmanifoldFamily, SubmanifoldMesh};
pub use verifiers::{InequalityReport, Tolerances, Verdict};
pub use warping::{Family, Fiber, ManifoldSpec, ProfileRange, WarpProfile};

pub type ManifoldSpec64 = ManifoldSpec<f64>;
pub type ManifoldSpec32 = ManifoldSpec<f32>;
pub type WarpProfile64 = WarpProfile<f64>;
pub type WarpProfile32 = WarpProfile<f32>;
pub type SubmanifoldFamily64 = SubmanifoldFamily<f64>;
pub type SubmanifoldMesh64 = SubmanifoldMesh<f64>;
pub type SubmanifoldMesh32 = SubmanifoldMesh<f32>;
pub type InequalityReport64 = InequalityReport<f64>;
pub type MonotoneTrace64 = MonotoneTrace<f64>;
