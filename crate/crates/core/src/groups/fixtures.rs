//! Small groups with known answers, used by tests, the CLI and the
//! acceptance suite.

use num_complex::Complex64;

use super::diagram::{CoxeterDiagram, Label};
use super::marked::MarkedGroup;
use super::vinberg::vinberg_realize;
use super::GroupError;
use crate::hypgeom::{Isometry, MoebiusIsometry, MoebiusModel};

fn real(a: f64, b: f64, c: f64, d: f64) -> Isometry {
    MoebiusIsometry::real(a, b, c, d).expect("valid matrix").into()
}

/// Level-2 principal congruence subgroup of `PSL_2(Z)`, free on
/// `a = [[1,2],[0,1]]` and `b = [[1,0],[2,1]]`. Generators in the order
/// `a, a⁻¹, b, b⁻¹`.
pub fn free_group_gamma2() -> MarkedGroup {
    MarkedGroup::new(
        "free(gamma2)",
        vec![
            real(1.0, 2.0, 0.0, 1.0),
            real(1.0, -2.0, 0.0, 1.0),
            real(1.0, 0.0, 2.0, 1.0),
            real(1.0, 0.0, -2.0, 1.0),
        ],
    )
    .expect("distinct generators")
}

/// Commuting parabolic translations `z ↦ z ± 1`, `z ↦ z ± i` of the upper
/// half-space, in the same generator order as [`free_group_gamma2`].
pub fn z2_translations() -> MarkedGroup {
    let c = |re, im| Complex64::new(re, im);
    let t = |b: Complex64| -> Isometry {
        MoebiusIsometry::new(MoebiusModel::Uhs3, c(1.0, 0.0), b, c(0.0, 0.0), c(1.0, 0.0))
            .expect("valid matrix")
            .into()
    };
    MarkedGroup::new(
        "z2",
        vec![t(c(1.0, 0.0)), t(c(-1.0, 0.0)), t(c(0.0, 1.0)), t(c(0.0, -1.0))],
    )
    .expect("distinct generators")
}

/// Cyclic group generated by `g = diag(2, 1/2)`, generators `g, g⁻¹`.
pub fn hyperbolic_cyclic() -> MarkedGroup {
    MarkedGroup::new("cyclic(diag(2,1/2))", vec![real(2.0, 0.0, 0.0, 0.5), real(0.5, 0.0, 0.0, 2.0)])
        .expect("distinct generators")
}

/// Rotation by `theta` about `i`.
pub fn elliptic_rotation(theta: f64) -> MarkedGroup {
    let (s, c) = (theta / 2.0).sin_cos();
    MarkedGroup::new("rotation", vec![real(c, s, -s, c)]).expect("one generator")
}

/// Reflection group of the two-node diagram with label `m`: the dihedral
/// group of order `2m`, or the infinite dihedral group for `m = ∞`.
pub fn dihedral(m: Label) -> Result<MarkedGroup, GroupError> {
    Ok(vinberg_realize(&CoxeterDiagram::dihedral(m)?)?.with_marked_edge((0, 1)))
}
