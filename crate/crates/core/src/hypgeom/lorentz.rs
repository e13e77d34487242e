use nalgebra::{Matrix4, Vector4};

use super::GeomError;
use crate::tolerance::Tolerances;

fn check_dim(d: usize) -> Result<(), GeomError> {
    if d == 2 || d == 3 {
        Ok(())
    } else {
        Err(GeomError::UnsupportedDimension(d))
    }
}

/// A vector of Minkowski space `R^{d,1}`, coordinates `x_0, ..., x_d` with
/// `x_0` the timelike one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzVector {
    dim: usize,
    coords: [f64; 4],
}

impl LorentzVector {
    /// Builds a vector from `d + 1` coordinates, `d` in {2, 3}.
    pub fn new(coords: &[f64]) -> Result<Self, GeomError> {
        let d = coords.len().saturating_sub(1);
        check_dim(d)?;
        let mut c = [0.0; 4];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Self { dim: d, coords: c })
    }

    pub(crate) fn from_array(dim: usize, coords: [f64; 4]) -> Self {
        debug_assert!(dim == 2 || dim == 3);
        Self { dim, coords }
    }

    /// The basepoint `(1, 0, ..., 0)`.
    pub fn basepoint(dim: usize) -> Result<Self, GeomError> {
        check_dim(dim)?;
        let mut c = [0.0; 4];
        c[0] = 1.0;
        Ok(Self { dim, coords: c })
    }

    /// Hyperbolic dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..=self.dim]
    }

    pub(crate) fn padded(&self) -> Vector4<f64> {
        Vector4::from(self.coords)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut c = self.coords;
        c.iter_mut().for_each(|x| *x *= s);
        Self { dim: self.dim, coords: c }
    }

    /// Whether the vector lies on the upper sheet of the hyperboloid.
    pub fn is_on_hyperboloid(&self, tol: f64) -> bool {
        let n = self.self_product();
        (n + 1.0).abs() <= tol * (1.0 + self.coords[0].abs()) && self.coords[0] > 0.0
    }

    pub(crate) fn self_product(&self) -> f64 {
        -self.coords[0] * self.coords[0]
            + self.coords[1..=self.dim].iter().map(|x| x * x).sum::<f64>()
    }

    pub(crate) fn require_hyperboloid(&self) -> Result<(), GeomError> {
        if self.is_on_hyperboloid(Tolerances::DEFAULT.hyperboloid) {
            Ok(())
        } else {
            Err(GeomError::NotOnHyperboloid {
                norm: self.self_product(),
                x0: self.coords[0],
            })
        }
    }
}

/// Lorentzian product `-x_0 y_0 + x_1 y_1 + ... + x_d y_d`.
pub fn lorentz_product(x: &LorentzVector, y: &LorentzVector) -> Result<f64, GeomError> {
    if x.dim != y.dim {
        return Err(GeomError::DimensionMismatch {
            left: x.dim,
            right: y.dim,
        });
    }
    Ok(product_unchecked(x, y))
}

pub(crate) fn product_unchecked(x: &LorentzVector, y: &LorentzVector) -> f64 {
    let mut s = -x.coords[0] * y.coords[0];
    for k in 1..=x.dim {
        s += x.coords[k] * y.coords[k];
    }
    s
}

/// Hyperbolic distance on the hyperboloid, `arccosh(-<x,y>)`.
pub fn dist_hyperboloid(x: &LorentzVector, y: &LorentzVector) -> Result<f64, GeomError> {
    let p = -lorentz_product(x, y)?;
    if p < 1.0 - Tolerances::DEFAULT.distance_pair {
        return Err(GeomError::InvalidPointPair(p));
    }
    Ok(p.max(1.0).acosh())
}

/// Reflection of `x` in the hyperplane orthogonal to the spacelike `v`:
/// `x - 2 <x,v> v / <v,v>`.
pub fn reflect_lorentz(v: &LorentzVector, x: &LorentzVector) -> Result<LorentzVector, GeomError> {
    let vv = lorentz_product(v, v)?;
    if vv <= 0.0 {
        return Err(GeomError::NotSpacelike(vv));
    }
    let s = 2.0 * lorentz_product(x, v)? / vv;
    let mut c = x.coords;
    for (ck, vk) in c.iter_mut().zip(v.coords.iter()) {
        *ck -= s * vk;
    }
    Ok(LorentzVector::from_array(x.dim, c))
}

/// Element of `O'_{d,1}(R)`: a linear map preserving the Lorentzian form and
/// the upper sheet of the hyperboloid.
///
/// Stored as a 4×4 matrix; for `d = 2` the last row and column are those of
/// the identity, so products never mix the padding into the live block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzIsometry {
    dim: usize,
    m: Matrix4<f64>,
}

fn form(dim: usize) -> Matrix4<f64> {
    let mut j = Matrix4::identity();
    j[(0, 0)] = -1.0;
    if dim == 2 {
        j[(3, 3)] = 1.0;
    }
    j
}

impl LorentzIsometry {
    /// Builds from row-major `(d+1)²` entries and checks `M^T J M = J` and the
    /// sheet condition.
    pub fn new(dim: usize, rows: &[f64]) -> Result<Self, GeomError> {
        check_dim(dim)?;
        let n = dim + 1;
        if rows.len() != n * n {
            return Err(GeomError::DimensionMismatch {
                left: rows.len(),
                right: n * n,
            });
        }
        let mut m = Matrix4::identity();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = rows[i * n + j];
            }
        }
        let iso = Self { dim, m };
        let r = iso.form_residual();
        if r > Tolerances::DEFAULT.lorentz_form {
            return Err(GeomError::NotLorentzian(r));
        }
        if iso.m[(0, 0)] <= 0.0 {
            return Err(GeomError::SwapsSheets);
        }
        Ok(iso)
    }

    /// Like [`Self::new`] without the form and sheet checks; for perturbation
    /// experiments.
    pub fn new_unchecked(dim: usize, rows: &[f64]) -> Result<Self, GeomError> {
        check_dim(dim)?;
        let n = dim + 1;
        if rows.len() != n * n {
            return Err(GeomError::DimensionMismatch {
                left: rows.len(),
                right: n * n,
            });
        }
        let mut m = Matrix4::identity();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = rows[i * n + j];
            }
        }
        Ok(Self { dim, m })
    }

    pub(crate) fn from_matrix(dim: usize, m: Matrix4<f64>) -> Self {
        Self { dim, m }
    }

    pub fn identity(dim: usize) -> Result<Self, GeomError> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            m: Matrix4::identity(),
        })
    }

    /// Reflection in the hyperplane orthogonal to the spacelike vector `v`:
    /// `I - 2 v v^T J / <v,v>`.
    pub fn reflection(v: &LorentzVector) -> Result<Self, GeomError> {
        let vv = v.self_product();
        if vv <= 0.0 {
            return Err(GeomError::NotSpacelike(vv));
        }
        let pv = v.padded();
        let jv = form(v.dim) * pv;
        let m = Matrix4::identity() - pv * jv.transpose() * (2.0 / vv);
        Ok(Self { dim: v.dim, m })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    /// Entry `(i, j)` of the live `(d+1)×(d+1)` block.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    /// Live entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.dim + 1;
        (0..n).flat_map(move |i| (0..n).map(move |j| self.m[(i, j)]))
    }

    /// `max |(M^T J M - J)_{ij}|`.
    pub fn form_residual(&self) -> f64 {
        let j = form(self.dim);
        (self.m.transpose() * j * self.m - j).amax()
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            m: self.m * rhs.m,
        }
    }

    /// `J M^T J`, exact for Lorentz matrices.
    pub fn inverse(&self) -> Self {
        let j = form(self.dim);
        Self {
            dim: self.dim,
            m: j * self.m.transpose() * j,
        }
    }

    pub fn apply(&self, x: &LorentzVector) -> Result<LorentzVector, GeomError> {
        if x.dim != self.dim {
            return Err(GeomError::DimensionMismatch {
                left: self.dim,
                right: x.dim,
            });
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &LorentzVector) -> LorentzVector {
        let y = self.m * x.padded();
        LorentzVector::from_array(self.dim, [y[0], y[1], y[2], if self.dim == 3 { y[3] } else { 0.0 }])
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }

    pub fn is_orientation_preserving(&self) -> bool {
        self.determinant() > 0.0
    }

    pub fn trace(&self) -> f64 {
        (0..=self.dim).map(|i| self.m[(i, i)]).sum()
    }

    /// Image of the basepoint: the first column.
    pub fn orbit_point(&self) -> LorentzVector {
        let mut c = [0.0; 4];
        for (i, ci) in c.iter_mut().enumerate().take(self.dim + 1) {
            *ci = self.m[(i, 0)];
        }
        LorentzVector::from_array(self.dim, c)
    }
}
