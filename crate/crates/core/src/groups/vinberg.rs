use nalgebra::{DMatrix, SymmetricEigen};

use super::diagram::{CoxeterDiagram, Label};
use super::marked::MarkedGroup;
use super::GroupError;
use crate::hypgeom::{Isometry, LorentzIsometry, LorentzVector};

const EIG_TOL: f64 = 1e-10;

/// Eigenvalue sign counts of a Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    pub fn of(gram: &[Vec<f64>]) -> Self {
        let m = gram.len();
        let g = DMatrix::from_fn(m, m, |i, j| gram[i][j]);
        let ev = SymmetricEigen::new(g).eigenvalues;
        let mut s = Signature {
            positive: 0,
            negative: 0,
            zero: 0,
        };
        for &l in ev.iter() {
            if l > EIG_TOL {
                s.positive += 1;
            } else if l < -EIG_TOL {
                s.negative += 1;
            } else {
                s.zero += 1;
            }
        }
        s
    }

    fn describe(&self) -> &'static str {
        match (self.negative, self.zero) {
            (0, 0) => "spherical (positive definite)",
            (0, _) => "Euclidean (degenerate, no negative direction)",
            (1, 0) => "hyperbolic",
            (1, _) => "degenerate with a negative direction",
            _ => "more than one negative direction",
        }
    }
}

fn cholesky(g: &[Vec<f64>], idx: &[usize]) -> Option<Vec<Vec<f64>>> {
    let k = idx.len();
    let mut l = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let mut s = g[idx[i]][idx[j]];
            for t in 0..j {
                s -= l[i][t] * l[j][t];
            }
            if i == j {
                if s <= EIG_TOL {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Normals from a positive definite block of `m - 1` walls: those walls get
/// spacelike axes `1..m-1` through the basepoint and the remaining wall takes
/// whatever time (or extra spacelike / null) component its norm requires.
fn normals_by_block(g: &[Vec<f64>], dim: usize, block: &[usize], rest: usize) -> Option<Vec<[f64; 4]>> {
    let l = cholesky(g, block)?;
    let k = block.len();
    let m = k + 1;
    let mut out = vec![[0.0; 4]; m];
    for (a, &i) in block.iter().enumerate() {
        for b in 0..=a {
            out[i][1 + b] = l[a][b];
        }
    }
    // Solve L s = (G_{rest, block}).
    let mut s = vec![0.0; k];
    for a in 0..k {
        let mut v = g[rest][block[a]];
        for b in 0..a {
            v -= l[a][b] * s[b];
        }
        s[a] = v / l[a][a];
    }
    for (a, sa) in s.iter().enumerate() {
        out[rest][1 + a] = *sa;
    }
    let r = 1.0 - s.iter().map(|x| x * x).sum::<f64>();
    let free_axis = 1 + k;
    if r < -EIG_TOL {
        out[rest][0] = (-r).sqrt();
    } else if m == dim + 1 {
        // All spacelike axes are used: a simplex needs a timelike component.
        return None;
    } else if r > EIG_TOL {
        out[rest][free_axis] = r.sqrt();
    } else {
        out[rest][0] = 1.0;
        out[rest][free_axis] = 1.0;
    }
    Some(out)
}

fn normals_by_eigen(g: &[Vec<f64>], dim: usize) -> Option<Vec<[f64; 4]>> {
    let m = g.len();
    if m != dim + 1 {
        return None;
    }
    let e = SymmetricEigen::new(DMatrix::from_fn(m, m, |i, j| g[i][j]));
    let neg = e.eigenvalues.iter().position(|&l| l < -EIG_TOL)?;
    let mut out = vec![[0.0; 4]; m];
    for (i, row) in out.iter_mut().enumerate() {
        let mut axis = 1;
        for k in 0..m {
            let w = e.eigenvectors[(i, k)] * e.eigenvalues[k].abs().sqrt();
            if k == neg {
                row[0] = w;
            } else {
                row[axis] = w;
                axis += 1;
            }
        }
    }
    Some(out)
}

/// Realizes the diagram as a reflection group in `R^{d,1}`: unit spacelike
/// normals `e_i` with `<e_i, e_j> = G_ij` and their reflections as
/// generators.
pub fn vinberg_realize(diagram: &CoxeterDiagram) -> Result<MarkedGroup, GroupError> {
    let g = diagram.gram();
    let m = diagram.size();
    let dim = diagram.dim();
    let sig = Signature::of(&g);
    let ok = if m == dim + 1 {
        sig.negative == 1 && sig.zero == 0
    } else {
        sig.negative + sig.zero <= 1 && sig.positive + sig.negative + 2 * sig.zero <= dim + 1
    };
    if !ok {
        return Err(GroupError::Signature {
            positive: sig.positive,
            negative: sig.negative,
            zero: sig.zero,
            kind: sig.describe(),
            diagram: diagram.to_string(),
        });
    }
    let mut normals = None;
    for block in combinations(m, m - 1) {
        let rest = (0..m).find(|i| !block.contains(i)).unwrap_or(0);
        if let Some(n) = normals_by_block(&g, dim, &block, rest) {
            normals = Some(n);
            break;
        }
    }
    let normals = normals
        .or_else(|| normals_by_eigen(&g, dim))
        .ok_or_else(|| GroupError::Signature {
            positive: sig.positive,
            negative: sig.negative,
            zero: sig.zero,
            kind: "not realizable by this construction",
            diagram: diagram.to_string(),
        })?;
    let vecs: Vec<LorentzVector> = normals
        .iter()
        .map(|n| LorentzVector::new(&n[..=dim]))
        .collect::<Result<_, _>>()?;
    let gens = vecs
        .iter()
        .map(|v| LorentzIsometry::reflection(v).map(Isometry::Lorentz))
        .collect::<Result<Vec<_>, _>>()?;
    let name = if m == 3 && dim == 2 {
        format!(
            "triangle({},{},{})",
            diagram.label(0, 1),
            diagram.label(1, 2),
            diagram.label(0, 2)
        )
    } else {
        format!("coxeter[{}]", diagram.to_string().replace('\n', "; "))
    };
    Ok(MarkedGroup::new(name, gens)?.with_diagram(diagram.clone(), vecs))
}

/// `(p, q, n)` triangle reflection group with `m_12 = p`, `m_23 = q`,
/// `m_13 = n` and marked edge `(r_1, r_3)`.
pub fn triangle_family(p: Label, q: Label, n: Label) -> Result<MarkedGroup, GroupError> {
    let s = p.reciprocal() + q.reciprocal() + n.reciprocal();
    if s >= 1.0 - 1e-12 {
        return Err(GroupError::NonHyperbolic(format!(
            "1/{p} + 1/{q} + 1/{n} = {s} is not < 1"
        )));
    }
    Ok(vinberg_realize(&CoxeterDiagram::triangle(p, q, n)?)?.with_marked_edge((0, 2)))
}
