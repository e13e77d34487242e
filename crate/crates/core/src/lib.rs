//! Random walks on discrete groups of hyperbolic isometries.
//!
//! Modules, bottom-up:
//!
//! * [`hypgeom`]: models of H² and H³, isometries, Busemann functions;
//! * [`groups`]: marked matrix groups, canonical element keys, Coxeter
//!   realizations, word balls;
//! * [`measures`]: finitely supported measures, entropy, convolution;
//! * [`estimators`]: drift, entropy and critical-exponent estimates and the
//!   fundamental-inequality diagnostic;
//! * [`boundary`]: hitting-measure sampling and Radon–Nikodym weights;
//! * [`dehnfill`]: Coxeter families with a varying edge label.

pub mod boundary;
pub mod dehnfill;
pub mod estimators;
pub mod groups;
pub mod hypgeom;
pub mod measures;
pub mod tolerance;
