use num_complex::Complex64;

use super::GeomError;
use crate::tolerance::Tolerances;

/// Which half-space model a Möbius matrix acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoebiusModel {
    /// Upper half-plane, `PSL_2(R)`.
    Uhp2,
    /// Upper half-space `C × R_{>0}`, `PSL_2(C)`.
    Uhs3,
}

/// Interior point of the upper half-plane or half-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HalfSpacePoint {
    /// `z` with `Im z > 0`.
    Plane(Complex64),
    /// `(z, t)` with `t > 0`.
    Space { z: Complex64, t: f64 },
}

impl HalfSpacePoint {
    pub fn height(&self) -> f64 {
        match *self {
            HalfSpacePoint::Plane(z) => z.im,
            HalfSpacePoint::Space { t, .. } => t,
        }
    }

    pub fn model(&self) -> MoebiusModel {
        match self {
            HalfSpacePoint::Plane(_) => MoebiusModel::Uhp2,
            HalfSpacePoint::Space { .. } => MoebiusModel::Uhs3,
        }
    }

    /// The fixed basepoint of the model.
    pub fn basepoint(model: MoebiusModel) -> Self {
        match model {
            MoebiusModel::Uhp2 => HalfSpacePoint::Plane(Complex64::i()),
            MoebiusModel::Uhs3 => HalfSpacePoint::Space {
                z: Complex64::new(0.0, 0.0),
                t: 1.0,
            },
        }
    }

    pub(crate) fn require_positive(&self) -> Result<(), GeomError> {
        let h = self.height();
        if h > 0.0 {
            Ok(())
        } else {
            Err(GeomError::NonPositiveHeight(h))
        }
    }
}

/// Point of `C ∪ {∞}` (or `R ∪ {∞}` for the half-plane): the ideal boundary
/// of the half-space models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IdealPoint {
    Finite(Complex64),
    Infinity,
}

/// Hyperbolic distance in the half-plane / half-space model.
pub fn dist_halfspace(p: &HalfSpacePoint, q: &HalfSpacePoint) -> Result<f64, GeomError> {
    p.require_positive()?;
    q.require_positive()?;
    let arg = match (*p, *q) {
        (HalfSpacePoint::Plane(z), HalfSpacePoint::Plane(w)) => {
            1.0 + (z - w).norm_sqr() / (2.0 * z.im * w.im)
        }
        (HalfSpacePoint::Space { z, t }, HalfSpacePoint::Space { z: w, t: s }) => {
            1.0 + ((z - w).norm_sqr() + (t - s) * (t - s)) / (2.0 * t * s)
        }
        _ => return Err(GeomError::ModelMismatch),
    };
    Ok(arg.acosh())
}

/// Element of `PSL_2(R)` or `PSL_2(C)`, stored normalized (`det = 1`) and
/// sign-canonical so that `M` and `-M` are stored identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusIsometry {
    model: MoebiusModel,
    m: [Complex64; 4],
}

fn canonical_sign(m: &mut [Complex64; 4]) {
    let tol = Tolerances::DEFAULT.psl_sign;
    for e in m.iter() {
        if e.norm() > tol {
            let negative = if e.re.abs() > tol { e.re < 0.0 } else { e.im < 0.0 };
            if negative {
                m.iter_mut().for_each(|x| *x = -*x);
            }
            return;
        }
    }
}

impl MoebiusIsometry {
    /// Normalizes `[[a, b], [c, d]]` to determinant one and fixes its sign.
    pub fn new(
        model: MoebiusModel,
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    ) -> Result<Self, GeomError> {
        let det = a * d - b * c;
        if det.norm() < 1e-300 {
            return Err(GeomError::Singular);
        }
        let s = match model {
            MoebiusModel::Uhp2 => {
                let scale = [a, b, c, d].iter().map(|x| x.norm()).fold(0.0, f64::max);
                let imag = [a, b, c, d].iter().map(|x| x.im.abs()).fold(0.0, f64::max);
                if imag > 1e-12 * scale || det.re <= 0.0 {
                    return Err(GeomError::NotRealPositive);
                }
                Complex64::new(det.re.sqrt(), 0.0)
            }
            MoebiusModel::Uhs3 => det.sqrt(),
        };
        let mut m = [a / s, b / s, c / s, d / s];
        if model == MoebiusModel::Uhp2 {
            m.iter_mut().for_each(|x| x.im = 0.0);
        }
        canonical_sign(&mut m);
        Ok(Self { model, m })
    }

    /// Real matrix acting on the half-plane.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self, GeomError> {
        let r = |x| Complex64::new(x, 0.0);
        Self::new(MoebiusModel::Uhp2, r(a), r(b), r(c), r(d))
    }

    pub fn identity(model: MoebiusModel) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            model,
            m: [one, zero, zero, one],
        }
    }

    pub fn model(&self) -> MoebiusModel {
        self.model
    }

    /// Entries `(a, b, c, d)`.
    pub fn entries(&self) -> &[Complex64; 4] {
        &self.m
    }

    pub fn determinant(&self) -> Complex64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0] + self.m[3]
    }

    /// Product `self · rhs`, renormalized when the determinant has drifted.
    pub fn compose(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.model, rhs.model);
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = rhs.m;
        let mut m = [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h];
        let det = m[0] * m[3] - m[1] * m[2];
        if (det - 1.0).norm() > 1e-13 {
            let s = det.sqrt();
            m.iter_mut().for_each(|x| *x /= s);
        }
        canonical_sign(&mut m);
        Self { model: self.model, m }
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.m;
        let mut m = [d, -b, -c, a];
        canonical_sign(&mut m);
        Self { model: self.model, m }
    }

    /// Action on an interior point. The half-space action is the standard
    /// extension of the boundary map to `C × R_{>0}`.
    pub fn apply(&self, p: &HalfSpacePoint) -> Result<HalfSpacePoint, GeomError> {
        if p.model() != self.model {
            return Err(GeomError::ModelMismatch);
        }
        p.require_positive()?;
        let [a, b, c, d] = self.m;
        Ok(match *p {
            HalfSpacePoint::Plane(z) => {
                let w = (a * z + b) / (c * z + d);
                HalfSpacePoint::Plane(Complex64::new(w.re, w.im))
            }
            HalfSpacePoint::Space { z, t } => {
                let q = c * z + d;
                let den = q.norm_sqr() + c.norm_sqr() * t * t;
                let num = (a * z + b) * q.conj() + a * c.conj() * t * t;
                HalfSpacePoint::Space {
                    z: num / den,
                    t: t / den,
                }
            }
        })
    }

    /// Action on the ideal boundary, with `∞` handled projectively.
    pub fn apply_ideal(&self, p: &IdealPoint) -> Result<IdealPoint, GeomError> {
        let [a, b, c, d] = self.m;
        if let (MoebiusModel::Uhp2, IdealPoint::Finite(z)) = (self.model, p) {
            if z.im != 0.0 {
                return Err(GeomError::NotOnBoundary);
            }
        }
        Ok(match *p {
            IdealPoint::Infinity => {
                if c.norm() == 0.0 {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite(a / c)
                }
            }
            IdealPoint::Finite(z) => {
                let q = c * z + d;
                if q.norm() == 0.0 {
                    IdealPoint::Infinity
                } else {
                    IdealPoint::Finite((a * z + b) / q)
                }
            }
        })
    }

    /// `cosh d(o, g·o) = |g|_F² / 2` for the fixed basepoint.
    pub fn cosh_displacement(&self) -> f64 {
        self.m.iter().map(|x| x.norm_sqr()).sum::<f64>() / 2.0
    }
}
