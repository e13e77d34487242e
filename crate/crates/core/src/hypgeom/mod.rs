//! Models of H² and H³ and their isometries.
//!
//! Three models are used side by side:
//!
//! * the hyperboloid `{x : <x,x> = -1, x_0 > 0}` in Minkowski space `R^{d,1}`,
//!   acted on by [`LorentzIsometry`];
//! * the upper half-plane / half-space, acted on by [`MoebiusIsometry`];
//! * the Poincaré disk / ball, used only to read off boundary points.
//!
//! Fixed basepoints: `i` in the half-plane, `(0, 1)` in the half-space and
//! `(1, 0, ..., 0)` on the hyperboloid. The conversions in this module map
//! these basepoints onto each other.

mod boundary;
mod isometry;
mod lorentz;
mod moebius;

pub use boundary::{
    boundary_project, boundary_to_ideal, busemann, busemann_halfspace, halfspace_to_hyperboloid,
    hyperboloid_to_halfspace, ideal_to_boundary, to_ball_model, BallPoint, BoundaryModel,
    BoundaryPoint,
};
pub use isometry::{Isometry, ModelTag};
pub use lorentz::{
    dist_hyperboloid, lorentz_product, reflect_lorentz, LorentzIsometry, LorentzVector,
};
pub use moebius::{dist_halfspace, HalfSpacePoint, IdealPoint, MoebiusIsometry, MoebiusModel};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("unsupported hyperbolic dimension {0} (only 2 and 3)")]
    UnsupportedDimension(usize),
    #[error("invalid point pair: -<x,y> = {0} < 1")]
    InvalidPointPair(f64),
    #[error("point is not on the upper sheet of the hyperboloid (<x,x> = {norm}, x0 = {x0})")]
    NotOnHyperboloid { norm: f64, x0: f64 },
    #[error("non-positive height {0}")]
    NonPositiveHeight(f64),
    #[error("vector is not spacelike (<v,v> = {0})")]
    NotSpacelike(f64),
    #[error("points belong to different models")]
    ModelMismatch,
    #[error("matrix does not preserve the Lorentzian form (residual {0:e})")]
    NotLorentzian(f64),
    #[error("matrix swaps the two sheets of the hyperboloid")]
    SwapsSheets,
    #[error("singular Möbius matrix")]
    Singular,
    #[error("half-plane Möbius matrix must be real with positive determinant")]
    NotRealPositive,
    #[error("orientation-reversing isometry has no Möbius form")]
    OrientationReversing,
    #[error("boundary point has norm {0}, expected 1")]
    NotUnit(f64),
    #[error("zero vector has no boundary projection")]
    ZeroVector,
    #[error("ideal point is not on the boundary of this model")]
    NotOnBoundary,
}
