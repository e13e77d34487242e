use num_complex::Complex64;

use super::lorentz::{product_unchecked, LorentzVector};
use super::moebius::{HalfSpacePoint, IdealPoint, MoebiusIsometry, MoebiusModel};
use super::GeomError;
use crate::tolerance::Tolerances;

/// Circle (boundary of H²) or sphere (boundary of H³).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryModel {
    Circle,
    Sphere,
}

impl BoundaryModel {
    pub fn for_dim(d: usize) -> Result<Self, GeomError> {
        match d {
            2 => Ok(BoundaryModel::Circle),
            3 => Ok(BoundaryModel::Sphere),
            _ => Err(GeomError::UnsupportedDimension(d)),
        }
    }

    /// Ambient Euclidean dimension of the sphere, also the hyperbolic `d`.
    pub fn dim(&self) -> usize {
        match self {
            BoundaryModel::Circle => 2,
            BoundaryModel::Sphere => 3,
        }
    }
}

/// Unit vector on `S^1 ⊂ R^2` or `S^2 ⊂ R^3`: ball-model coordinates of an
/// ideal point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    model: BoundaryModel,
    value: [f64; 3],
}

impl BoundaryPoint {
    pub fn new(value: &[f64]) -> Result<Self, GeomError> {
        let model = BoundaryModel::for_dim(value.len())?;
        let n = value.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (n - 1.0).abs() > Tolerances::DEFAULT.boundary_norm {
            return Err(GeomError::NotUnit(n));
        }
        let mut v = [0.0; 3];
        v[..value.len()].copy_from_slice(value);
        Ok(Self { model, value: v })
    }

    /// Normalizes an arbitrary nonzero direction.
    pub fn from_direction(dir: &[f64]) -> Result<Self, GeomError> {
        let model = BoundaryModel::for_dim(dir.len())?;
        let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(GeomError::ZeroVector);
        }
        let mut v = [0.0; 3];
        for (vi, di) in v.iter_mut().zip(dir) {
            *vi = di / n;
        }
        Ok(Self { model, value: v })
    }

    pub fn model(&self) -> BoundaryModel {
        self.model
    }

    pub fn value(&self) -> &[f64] {
        &self.value[..self.model.dim()]
    }

    /// The null vector `(1, ξ)` representing this point in `R^{d,1}`.
    pub fn null_vector(&self) -> LorentzVector {
        let v = self.value;
        LorentzVector::from_array(self.model.dim(), [1.0, v[0], v[1], v[2]])
    }

    /// Euclidean (chordal) distance between two boundary points.
    pub fn chord(&self, other: &BoundaryPoint) -> f64 {
        self.value
            .iter()
            .zip(other.value.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Point of the open Poincaré disk / ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallPoint {
    dim: usize,
    coords: [f64; 3],
}

impl BallPoint {
    /// Coordinates of a point of the closed unit ball; 2 or 3 of them.
    pub fn from_coords(c: &[f64]) -> Self {
        let mut coords = [0.0; 3];
        coords[..c.len()].copy_from_slice(c);
        Self { dim: c.len(), coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Cayley-type image of a half-plane / half-space point; `i` (resp.
    /// `(0, 1)`) goes to the center and `∞` to the last unit axis.
    pub fn from_halfspace(p: &HalfSpacePoint) -> Result<Self, GeomError> {
        p.require_positive()?;
        Ok(to_ball_model(&halfspace_to_hyperboloid(p)?))
    }
}

/// Hyperboloid point to the ball model, `(x_1, ..., x_d) / (1 + x_0)`.
pub fn to_ball_model(x: &LorentzVector) -> BallPoint {
    let c = x.coords();
    let s = 1.0 + c[0];
    let mut out = [0.0; 3];
    for k in 1..c.len() {
        out[k - 1] = c[k] / s;
    }
    BallPoint {
        dim: x.dim(),
        coords: out,
    }
}

/// Radial projection of a ball point onto the boundary sphere.
pub fn boundary_project(p: &BallPoint) -> Result<BoundaryPoint, GeomError> {
    BoundaryPoint::from_direction(p.coords())
}

/// Half-plane / half-space point on the hyperboloid. The basepoints `i` and
/// `(0, 1)` map to `(1, 0, ..., 0)`.
pub fn halfspace_to_hyperboloid(p: &HalfSpacePoint) -> Result<LorentzVector, GeomError> {
    p.require_positive()?;
    Ok(match *p {
        HalfSpacePoint::Plane(z) => {
            let (x, t) = (z.re, z.im);
            let r2 = x * x + t * t;
            LorentzVector::from_array(
                2,
                [(1.0 + r2) / (2.0 * t), x / t, (r2 - 1.0) / (2.0 * t), 0.0],
            )
        }
        HalfSpacePoint::Space { z, t } => {
            let r2 = z.norm_sqr() + t * t;
            LorentzVector::from_array(
                3,
                [(1.0 + r2) / (2.0 * t), z.re / t, z.im / t, (r2 - 1.0) / (2.0 * t)],
            )
        }
    })
}

/// Inverse of [`halfspace_to_hyperboloid`].
pub fn hyperboloid_to_halfspace(x: &LorentzVector) -> Result<HalfSpacePoint, GeomError> {
    x.require_hyperboloid()?;
    let c = x.coords();
    Ok(match x.dim() {
        2 => {
            let t = 1.0 / (c[0] - c[2]);
            HalfSpacePoint::Plane(Complex64::new(c[1] * t, t))
        }
        _ => {
            let t = 1.0 / (c[0] - c[3]);
            HalfSpacePoint::Space {
                z: Complex64::new(c[1] * t, c[2] * t),
                t,
            }
        }
    })
}

/// Ideal point of the half-space model to its ball-model boundary point.
pub fn ideal_to_boundary(p: &IdealPoint, model: MoebiusModel) -> Result<BoundaryPoint, GeomError> {
    let v: [f64; 3] = match (model, *p) {
        (MoebiusModel::Uhp2, IdealPoint::Infinity) => [0.0, 1.0, 0.0],
        (MoebiusModel::Uhs3, IdealPoint::Infinity) => [0.0, 0.0, 1.0],
        (MoebiusModel::Uhp2, IdealPoint::Finite(z)) => {
            if z.im != 0.0 {
                return Err(GeomError::NotOnBoundary);
            }
            let x = z.re;
            let s = 1.0 + x * x;
            [2.0 * x / s, (x * x - 1.0) / s, 0.0]
        }
        (MoebiusModel::Uhs3, IdealPoint::Finite(z)) => {
            let r2 = z.norm_sqr();
            let s = 1.0 + r2;
            [2.0 * z.re / s, 2.0 * z.im / s, (r2 - 1.0) / s]
        }
    };
    let n = if model == MoebiusModel::Uhp2 { 2 } else { 3 };
    BoundaryPoint::from_direction(&v[..n])
}

/// Inverse of [`ideal_to_boundary`] (stereographic projection from the last
/// axis).
pub fn boundary_to_ideal(xi: &BoundaryPoint) -> IdealPoint {
    let v = xi.value();
    match xi.model() {
        BoundaryModel::Circle => {
            let den = 1.0 - v[1];
            if den <= 1e-300 {
                IdealPoint::Infinity
            } else {
                IdealPoint::Finite(Complex64::new(v[0] / den, 0.0))
            }
        }
        BoundaryModel::Sphere => {
            let den = 1.0 - v[2];
            if den <= 1e-300 {
                IdealPoint::Infinity
            } else {
                IdealPoint::Finite(Complex64::new(v[0] / den, v[1] / den))
            }
        }
    }
}

/// Busemann function `β_ξ(x, y) = lim_{z→ξ} d(x, z) - d(y, z)` on the
/// hyperboloid: `log(<x, ξ̂> / <y, ξ̂>)` for the null vector `ξ̂ = (1, ξ)`.
/// Positive when `y` is closer to `ξ` than `x`.
pub fn busemann(xi: &BoundaryPoint, x: &LorentzVector, y: &LorentzVector) -> Result<f64, GeomError> {
    if x.dim() != xi.model().dim() || y.dim() != x.dim() {
        return Err(GeomError::DimensionMismatch {
            left: xi.model().dim(),
            right: x.dim(),
        });
    }
    let n = xi.null_vector();
    let px = -product_unchecked(x, &n);
    let py = -product_unchecked(y, &n);
    Ok(px.ln() - py.ln())
}

/// Busemann function in the half-space model: `ξ` is moved to `∞` by
/// `z ↦ -1/(z - ξ)`, after which `β_∞(x, y) = log(t_y / t_x)`.
pub fn busemann_halfspace(
    xi: &IdealPoint,
    x: &HalfSpacePoint,
    y: &HalfSpacePoint,
) -> Result<f64, GeomError> {
    if x.model() != y.model() {
        return Err(GeomError::ModelMismatch);
    }
    x.require_positive()?;
    y.require_positive()?;
    let (xs, ys) = match *xi {
        IdealPoint::Infinity => (*x, *y),
        IdealPoint::Finite(zeta) => {
            if x.model() == MoebiusModel::Uhp2 && zeta.im != 0.0 {
                return Err(GeomError::NotOnBoundary);
            }
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            let t = MoebiusIsometry::new(x.model(), zero, -one, one, -zeta)?;
            (t.apply(x)?, t.apply(y)?)
        }
    };
    Ok(ys.height().ln() - xs.height().ln())
}
