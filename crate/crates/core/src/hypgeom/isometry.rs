use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use super::boundary::{boundary_to_ideal, halfspace_to_hyperboloid, ideal_to_boundary, BoundaryPoint};
use super::lorentz::{LorentzIsometry, LorentzVector};
use super::moebius::{HalfSpacePoint, MoebiusIsometry, MoebiusModel};
use super::GeomError;

/// Model an isometry (and its group) lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelTag {
    Uhp2,
    Uhs3,
    /// Hyperboloid in `R^{d,1}`.
    Lorentz(usize),
}

impl ModelTag {
    pub fn dim(&self) -> usize {
        match self {
            ModelTag::Uhp2 => 2,
            ModelTag::Uhs3 => 3,
            ModelTag::Lorentz(d) => *d,
        }
    }

    pub fn name(&self) -> String {
        match self {
            ModelTag::Uhp2 => "uhp2".into(),
            ModelTag::Uhs3 => "uhs3".into(),
            ModelTag::Lorentz(d) => format!("lorentz{d}"),
        }
    }
}

impl From<MoebiusModel> for ModelTag {
    fn from(m: MoebiusModel) -> Self {
        match m {
            MoebiusModel::Uhp2 => ModelTag::Uhp2,
            MoebiusModel::Uhs3 => ModelTag::Uhs3,
        }
    }
}

type C2 = Matrix2<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Hermitian matrix of a Minkowski vector (padded to `R^{3,1}`).
fn hermitian(x: &[f64; 4]) -> C2 {
    C2::new(
        c(x[0] + x[3], 0.0),
        c(x[1], x[2]),
        c(x[1], -x[2]),
        c(x[0] - x[3], 0.0),
    )
}

fn unhermitian(h: &C2) -> [f64; 4] {
    [
        (h[(0, 0)].re + h[(1, 1)].re) / 2.0,
        h[(0, 1)].re,
        h[(0, 1)].im,
        (h[(0, 0)].re - h[(1, 1)].re) / 2.0,
    ]
}

fn as_c2(g: &MoebiusIsometry) -> C2 {
    let [a, b, cc, d] = *g.entries();
    C2::new(a, b, cc, d)
}

/// Lorentz matrix of `g` under `H(g·x) = g H(x) g*`. Half-plane matrices
/// give the `3×3` form on `R^{2,1}` (coordinates `x_0, x_1, x_2`).
pub(crate) fn mobius_to_lorentz(g: &MoebiusIsometry) -> LorentzIsometry {
    let gm = as_c2(g);
    let gs = gm.adjoint();
    let mut m4 = Matrix4::zeros();
    for j in 0..4 {
        let mut e = [0.0; 4];
        e[j] = 1.0;
        let y = unhermitian(&(gm * hermitian(&e) * gs));
        for i in 0..4 {
            m4[(i, j)] = y[i];
        }
    }
    match g.model() {
        MoebiusModel::Uhs3 => LorentzIsometry::from_matrix(3, m4),
        MoebiusModel::Uhp2 => {
            // Real g fixes the x_2 axis; drop it and move x_3 to slot 2.
            let idx = [0, 1, 3];
            let mut m = Matrix4::identity();
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    m[(a, b)] = m4[(i, j)];
                }
            }
            LorentzIsometry::from_matrix(2, m)
        }
    }
}

/// Inverse of [`mobius_to_lorentz`] for orientation-preserving elements.
pub(crate) fn lorentz_to_mobius(l: &LorentzIsometry) -> Result<MoebiusIsometry, GeomError> {
    if !l.is_orientation_preserving() {
        return Err(GeomError::OrientationReversing);
    }
    let model = if l.dim() == 2 { MoebiusModel::Uhp2 } else { MoebiusModel::Uhs3 };
    // Embed into R^{3,1} with x_2 fixed when d = 2.
    let m4 = if l.dim() == 3 {
        *l.matrix()
    } else {
        let idx = [0, 1, 3];
        let mut m = Matrix4::identity();
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(i, j)] = l.matrix()[(a, b)];
            }
        }
        m
    };
    let image = |x: [f64; 4]| -> C2 {
        let v = m4 * nalgebra::Vector4::from(x);
        hermitian(&[v[0], v[1], v[2], v[3]])
    };
    // g E11 g* = c1 c1*, g H(e_1) g* = c1 c2* + c2 c1*, g H(e_2) g* = i(c1 c2* - c2 c1*).
    let a = image([0.5, 0.0, 0.0, 0.5]);
    let s = image([0.0, 1.0, 0.0, 0.0]);
    let t = image([0.0, 0.0, 1.0, 0.0]);
    let cm = (s - t * c(0.0, 1.0)) * c(0.5, 0.0);
    let (a00, a11) = (a[(0, 0)].re, a[(1, 1)].re);
    let c1 = if a00 >= a11 {
        let r = a00.max(0.0).sqrt();
        [c(r, 0.0), a[(1, 0)] / r]
    } else {
        let r = a11.max(0.0).sqrt();
        [a[(0, 1)] / r, c(r, 0.0)]
    };
    let n1 = c1[0].norm_sqr() + c1[1].norm_sqr();
    if n1 == 0.0 || !n1.is_finite() {
        return Err(GeomError::Singular);
    }
    let cs = cm.adjoint();
    let c2 = [
        (cs[(0, 0)] * c1[0] + cs[(0, 1)] * c1[1]) / n1,
        (cs[(1, 0)] * c1[0] + cs[(1, 1)] * c1[1]) / n1,
    ];
    let (ga, gb, gc, gd) = (c1[0], c2[0], c1[1], c2[1]);
    let g = match model {
        MoebiusModel::Uhs3 => MoebiusIsometry::new(model, ga, gb, gc, gd)?,
        MoebiusModel::Uhp2 => {
            // Fix the global phase so the entries are real.
            let big = [ga, gb, gc, gd]
                .into_iter()
                .max_by(|x, y| x.norm().total_cmp(&y.norm()))
                .unwrap_or(c(1.0, 0.0));
            let ph = big.conj() / big.norm();
            let r = |z: Complex64| c((z * ph).re, 0.0);
            let det = (ga * gd - gb * gc) * ph * ph;
            if det.re <= 0.0 {
                return Err(GeomError::OrientationReversing);
            }
            MoebiusIsometry::new(model, r(ga), r(gb), r(gc), r(gd))?
        }
    };
    let back = mobius_to_lorentz(&g);
    let err = (back.matrix() - l.matrix()).amax();
    let scale = l.matrix().amax().max(1.0);
    if err > 1e-7 * scale {
        return Err(GeomError::NotLorentzian(err));
    }
    Ok(g)
}

/// An isometry in either matrix form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Isometry {
    Moebius(MoebiusIsometry),
    Lorentz(LorentzIsometry),
}

impl Isometry {
    pub fn identity(tag: ModelTag) -> Result<Self, GeomError> {
        Ok(match tag {
            ModelTag::Uhp2 => Isometry::Moebius(MoebiusIsometry::identity(MoebiusModel::Uhp2)),
            ModelTag::Uhs3 => Isometry::Moebius(MoebiusIsometry::identity(MoebiusModel::Uhs3)),
            ModelTag::Lorentz(d) => Isometry::Lorentz(LorentzIsometry::identity(d)?),
        })
    }

    pub fn tag(&self) -> ModelTag {
        match self {
            Isometry::Moebius(m) => m.model().into(),
            Isometry::Lorentz(l) => ModelTag::Lorentz(l.dim()),
        }
    }

    pub fn dim(&self) -> usize {
        self.tag().dim()
    }

    /// `self · rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Self) -> Result<Self, GeomError> {
        match (self, rhs) {
            (Isometry::Moebius(a), Isometry::Moebius(b)) if a.model() == b.model() => {
                Ok(Isometry::Moebius(a.compose(b)))
            }
            (Isometry::Lorentz(a), Isometry::Lorentz(b)) if a.dim() == b.dim() => {
                Ok(Isometry::Lorentz(a.compose(b)))
            }
            _ => Err(GeomError::ModelMismatch),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            Isometry::Moebius(m) => Isometry::Moebius(m.inverse()),
            Isometry::Lorentz(l) => Isometry::Lorentz(l.inverse()),
        }
    }

    /// `cosh d(o, g·o)` for the model's basepoint.
    pub fn cosh_displacement(&self) -> f64 {
        match self {
            Isometry::Moebius(m) => m.cosh_displacement(),
            Isometry::Lorentz(l) => l.entry(0, 0),
        }
    }

    /// `d(o, g·o)`.
    pub fn displacement(&self) -> f64 {
        self.cosh_displacement().max(1.0).acosh()
    }

    /// `g·o` on the hyperboloid.
    pub fn orbit_point(&self) -> LorentzVector {
        match self {
            Isometry::Lorentz(l) => l.orbit_point(),
            Isometry::Moebius(m) => {
                let o = HalfSpacePoint::basepoint(m.model());
                let p = m.apply(&o).expect("basepoint has positive height");
                halfspace_to_hyperboloid(&p).expect("image has positive height")
            }
        }
    }

    pub fn act_on_hyperboloid(&self, x: &LorentzVector) -> Result<LorentzVector, GeomError> {
        match self {
            Isometry::Lorentz(l) => l.apply(x),
            Isometry::Moebius(m) => mobius_to_lorentz(m).apply(x),
        }
    }

    /// Action on the ball-model boundary.
    pub fn act_on_boundary(&self, xi: &BoundaryPoint) -> Result<BoundaryPoint, GeomError> {
        if xi.model().dim() != self.dim() {
            return Err(GeomError::DimensionMismatch {
                left: self.dim(),
                right: xi.model().dim(),
            });
        }
        match self {
            Isometry::Moebius(m) => {
                let p = m.apply_ideal(&boundary_to_ideal(xi))?;
                ideal_to_boundary(&p, m.model())
            }
            Isometry::Lorentz(l) => {
                let y = l.apply(&xi.null_vector())?;
                let c = y.coords();
                BoundaryPoint::from_direction(&c[1..])
            }
        }
    }

    pub fn to_lorentz(&self) -> LorentzIsometry {
        match self {
            Isometry::Lorentz(l) => *l,
            Isometry::Moebius(m) => mobius_to_lorentz(m),
        }
    }

    /// Möbius form of an orientation-preserving isometry.
    pub fn to_moebius(&self) -> Result<MoebiusIsometry, GeomError> {
        match self {
            Isometry::Moebius(m) => Ok(*m),
            Isometry::Lorentz(l) => lorentz_to_mobius(l),
        }
    }

    /// Flat list of real numbers describing the matrix: real and imaginary
    /// parts for Möbius, live block entries for Lorentz.
    pub fn flat_entries(&self) -> Vec<f64> {
        match self {
            Isometry::Moebius(m) => match m.model() {
                MoebiusModel::Uhp2 => m.entries().iter().map(|z| z.re).collect(),
                MoebiusModel::Uhs3 => m.entries().iter().flat_map(|z| [z.re, z.im]).collect(),
            },
            Isometry::Lorentz(l) => l.entries().collect(),
        }
    }

    /// Writes [`Self::flat_entries`] into a stack buffer and returns the
    /// number of entries written.
    pub fn write_flat(&self, out: &mut [f64; 16]) -> usize {
        match self {
            Isometry::Moebius(m) => match m.model() {
                MoebiusModel::Uhp2 => {
                    for (o, z) in out.iter_mut().zip(m.entries()) {
                        *o = z.re;
                    }
                    4
                }
                MoebiusModel::Uhs3 => {
                    for (k, z) in m.entries().iter().enumerate() {
                        out[2 * k] = z.re;
                        out[2 * k + 1] = z.im;
                    }
                    8
                }
            },
            Isometry::Lorentz(l) => {
                let n = l.dim() + 1;
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = l.entry(i, j);
                    }
                }
                n * n
            }
        }
    }

    /// `max` entrywise difference, `∞` across models.
    pub fn distance_to(&self, other: &Self) -> f64 {
        if self.tag() != other.tag() {
            return f64::INFINITY;
        }
        let (mut a, mut b) = ([0.0; 16], [0.0; 16]);
        let n = self.write_flat(&mut a);
        other.write_flat(&mut b);
        a[..n]
            .iter()
            .zip(&b[..n])
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

impl From<MoebiusIsometry> for Isometry {
    fn from(m: MoebiusIsometry) -> Self {
        Isometry::Moebius(m)
    }
}

impl From<LorentzIsometry> for Isometry {
    fn from(l: LorentzIsometry) -> Self {
        Isometry::Lorentz(l)
    }
}
