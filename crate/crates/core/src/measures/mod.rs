//! Finitely supported probability measures on marked groups.

mod parse;

pub use parse::{parse_mass, parse_measure};

use rayon::prelude::*;
use thiserror::Error;

use crate::groups::{ball, ElementIndex, GroupElement, GroupError, KeyScheme, MarkedGroup, Word};
use crate::hypgeom::{Isometry, ModelTag};
use crate::tolerance::{Limits, Tolerances};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("support would exceed {cap} atoms (reached {size})")]
    SupportOverflow { size: usize, cap: usize },
    #[error("atom {0} has no word")]
    MissingWord(usize),
    #[error("invalid mass: {0}")]
    InvalidMass(String),
    #[error("measure parse error: {0}")]
    Parse(String),
    #[error("measures live in different models")]
    ModelMismatch,
    #[error("bad generator correspondence: {0}")]
    BadCorrespondence(String),
}

/// Probability measure with finitely many atoms, keyed by canonical element.
#[derive(Debug, Clone)]
pub struct FinSuppMeasure {
    tag: ModelTag,
    index: ElementIndex,
    masses: Vec<f64>,
    dropped: f64,
}

/// Options for [`convolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolveOptions {
    /// Atoms lighter than this are dropped (0 disables pruning).
    pub prune_floor: f64,
    pub support_cap: usize,
    /// Record words on the product atoms (needed for pushforwards).
    pub keep_words: bool,
}

impl Default for ConvolveOptions {
    fn default() -> Self {
        Self {
            prune_floor: Tolerances::DEFAULT.prune_floor,
            support_cap: Limits::DEFAULT.support,
            keep_words: false,
        }
    }
}

const CHUNK: usize = 512;

impl FinSuppMeasure {
    /// Merges repeated elements and checks that masses are positive and sum
    /// to one.
    pub fn from_atoms(
        scheme: KeyScheme,
        atoms: Vec<(GroupElement, f64)>,
        tol: &Tolerances,
    ) -> Result<Self, MeasureError> {
        let first = atoms
            .first()
            .ok_or_else(|| MeasureError::InvalidMass("empty measure".into()))?;
        let tag = first.0.isometry().tag();
        let mut index = ElementIndex::new(scheme);
        let mut masses = Vec::new();
        for (e, p) in atoms {
            if !(p > 0.0) || !p.is_finite() {
                return Err(MeasureError::InvalidMass(format!("mass {p} is not positive")));
            }
            if e.isometry().tag() != tag {
                return Err(MeasureError::ModelMismatch);
            }
            let (i, new) = index.insert(e)?;
            if new {
                masses.push(p);
            } else {
                masses[i] += p;
            }
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > tol.mass_total {
            return Err(MeasureError::InvalidMass(format!("total mass {total} != 1")));
        }
        Ok(Self {
            tag,
            index,
            masses,
            dropped: 0.0,
        })
    }

    pub fn point_mass(e: GroupElement) -> Self {
        let tag = e.isometry().tag();
        let mut index = ElementIndex::new(KeyScheme::default());
        index.insert(e).expect("empty index cannot collide");
        Self {
            tag,
            index,
            masses: vec![1.0],
            dropped: 0.0,
        }
    }

    /// Mass `p_i` on generator `i`.
    pub fn weighted(group: &MarkedGroup, weights: &[f64]) -> Result<Self, MeasureError> {
        if weights.len() != group.rank() {
            return Err(MeasureError::InvalidMass(format!(
                "{} weights for {} generators",
                weights.len(),
                group.rank()
            )));
        }
        let atoms = group
            .generators()
            .iter()
            .cloned()
            .zip(weights.iter().copied())
            .collect();
        Self::from_atoms(group.key_scheme(), atoms, group.tolerances())
    }

    pub fn uniform_on_generators(group: &MarkedGroup) -> Result<Self, MeasureError> {
        let w = vec![1.0 / group.rank() as f64; group.rank()];
        Self::weighted(group, &w)
    }

    pub fn tag(&self) -> ModelTag {
        self.tag
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&GroupElement, f64)> + '_ {
        self.index.elements().iter().zip(self.masses.iter().copied())
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        self.index.get(i)
    }

    /// Mass pruned while building this measure, including pruning inherited
    /// from its factors.
    pub fn dropped_mass(&self) -> f64 {
        self.dropped
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Mass of the atom equal to `g`, 0 if absent.
    pub fn mass_of(&self, g: &Isometry) -> Result<f64, MeasureError> {
        Ok(self.index.find(g)?.map_or(0.0, |i| self.masses[i]))
    }

    /// Cumulative distribution over atoms, for sampling.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .masses
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        if let Some(last) = out.last_mut() {
            *last = f64::INFINITY;
        }
        out
    }
}

/// Shannon entropy in nats.
pub fn entropy(m: &FinSuppMeasure) -> f64 {
    m.masses
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

struct Partial {
    index: ElementIndex,
    masses: Vec<f64>,
}

/// `μ * ν`: mass `μ(g) ν(h)` on `g·h`. Runs over fixed-size chunks of `μ`'s
/// atoms in parallel and merges chunks in index order, so the result does not
/// depend on the thread count.
pub fn convolve(
    mu: &FinSuppMeasure,
    nu: &FinSuppMeasure,
    opts: &ConvolveOptions,
) -> Result<FinSuppMeasure, MeasureError> {
    if mu.tag != nu.tag {
        return Err(MeasureError::ModelMismatch);
    }
    let scheme = *mu.index.scheme();
    let left = mu.index.elements();
    let right = nu.index.elements();
    let starts: Vec<usize> = (0..left.len()).step_by(CHUNK).collect();
    let partials: Vec<Result<Partial, MeasureError>> = starts
        .par_iter()
        .map(|&s| {
            let e = (s + CHUNK).min(left.len());
            let mut index = ElementIndex::with_capacity(scheme, ((e - s) * right.len()).min(1 << 16));
            let mut masses = Vec::new();
            for i in s..e {
                let (g, p) = (&left[i], mu.masses[i]);
                for (h, q) in right.iter().zip(&nu.masses) {
                    let prod = g.isometry().compose(h.isometry()).map_err(GroupError::from)?;
                    let word = || match (opts.keep_words, g.word(), h.word()) {
                        (true, Some(a), Some(b)) => Some(a.concat(b)),
                        _ => None,
                    };
                    let (slot, new) = index.insert_isometry(prod, word)?;
                    if new {
                        masses.push(p * q);
                    } else {
                        masses[slot] += p * q;
                    }
                }
                if index.len() > opts.support_cap {
                    return Err(MeasureError::SupportOverflow {
                        size: index.len(),
                        cap: opts.support_cap,
                    });
                }
            }
            Ok(Partial { index, masses })
        })
        .collect();

    let mut index = ElementIndex::new(scheme);
    let mut masses: Vec<f64> = Vec::new();
    for part in partials {
        let part = part?;
        for (e, p) in part.index.into_elements().into_iter().zip(part.masses) {
            let (slot, new) = index.insert(e)?;
            if new {
                masses.push(p);
                if masses.len() > opts.support_cap {
                    return Err(MeasureError::SupportOverflow {
                        size: masses.len(),
                        cap: opts.support_cap,
                    });
                }
            } else {
                masses[slot] += p;
            }
        }
    }

    let inherited = mu.dropped + nu.dropped;
    let mut dropped = 0.0;
    if opts.prune_floor > 0.0 && masses.iter().any(|&p| p < opts.prune_floor) {
        let mut kept = ElementIndex::with_capacity(scheme, masses.len());
        let mut kept_m = Vec::with_capacity(masses.len());
        for (e, p) in index.into_elements().into_iter().zip(masses) {
            if p < opts.prune_floor {
                dropped += p;
            } else {
                kept.insert(e)?;
                kept_m.push(p);
            }
        }
        let total: f64 = kept_m.iter().sum();
        kept_m.iter_mut().for_each(|p| *p /= total);
        index = kept;
        masses = kept_m;
    }
    Ok(FinSuppMeasure {
        tag: mu.tag,
        index,
        masses,
        dropped: inherited + dropped,
    })
}

/// Re-evaluates each atom's word in `target` with generator `i` replaced by
/// `correspondence[i]`; atoms that become equal merge. No pruning.
pub fn pushforward(
    mu: &FinSuppMeasure,
    target: &MarkedGroup,
    correspondence: &[usize],
) -> Result<FinSuppMeasure, MeasureError> {
    let mut seen = vec![false; target.rank()];
    for &c in correspondence {
        if c >= target.rank() || std::mem::replace(&mut seen[c], true) {
            return Err(MeasureError::BadCorrespondence(format!(
                "{correspondence:?} is not injective into {} generators",
                target.rank()
            )));
        }
    }
    let mut index = ElementIndex::new(target.key_scheme());
    let mut masses: Vec<f64> = Vec::new();
    for (k, (e, p)) in mu.atoms().enumerate() {
        let w = e.word().ok_or(MeasureError::MissingWord(k))?;
        let mapped = w
            .letters()
            .iter()
            .map(|&l| {
                correspondence
                    .get(l as usize)
                    .map(|&c| c as u16)
                    .ok_or_else(|| MeasureError::BadCorrespondence(format!("no image for generator {}", l + 1)))
            })
            .collect::<Result<Vec<u16>, _>>()?;
        let mapped = Word(mapped);
        let g = target.evaluate(&mapped)?;
        let (slot, new) = index.insert_isometry(g, || Some(mapped))?;
        if new {
            masses.push(p);
        } else {
            masses[slot] += p;
        }
    }
    Ok(FinSuppMeasure {
        tag: target.tag(),
        index,
        masses,
        dropped: mu.dropped,
    })
}

/// Answer of [`is_nondegenerate`]; the check never concludes "no".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nondegeneracy {
    Yes,
    Unknown,
}

/// `Yes` when products of at most `probe_radius` support elements cover the
/// word ball of radius `probe_radius / 2`.
pub fn is_nondegenerate(
    mu: &FinSuppMeasure,
    group: &MarkedGroup,
    probe_radius: usize,
    limits: &Limits,
) -> Result<Nondegeneracy, MeasureError> {
    if mu.tag != group.tag() {
        return Err(MeasureError::ModelMismatch);
    }
    let target = ball(group, probe_radius / 2, limits)?;
    let support: Vec<Isometry> = mu.index.elements().iter().map(|e| *e.isometry()).collect();
    let mut reached = ElementIndex::new(group.key_scheme());
    let mut frontier: Vec<Isometry> = Vec::new();
    for s in &support {
        if reached.insert_isometry(*s, || None)?.1 {
            frontier.push(*s);
        }
    }
    for _ in 1..probe_radius {
        let mut next = Vec::new();
        for f in &frontier {
            for s in &support {
                let p = f.compose(s).map_err(GroupError::from)?;
                if reached.insert_isometry(p, || None)?.1 {
                    next.push(p);
                }
            }
            if reached.len() > limits.support {
                return Err(MeasureError::SupportOverflow {
                    size: reached.len(),
                    cap: limits.support,
                });
            }
        }
        frontier = next;
    }
    for e in &target.elements {
        if reached.find(e.isometry())?.is_none() {
            return Ok(Nondegeneracy::Unknown);
        }
    }
    Ok(Nondegeneracy::Yes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{fixtures, Label};

    fn free() -> (MarkedGroup, FinSuppMeasure) {
        let g = fixtures::free_group_gamma2();
        let m = FinSuppMeasure::uniform_on_generators(&g).unwrap();
        (g, m)
    }

    #[test]
    fn entropy_examples() {
        let (_, m) = free();
        assert!((entropy(&m) - 4f64.ln()).abs() < 1e-12);
        let g = fixtures::free_group_gamma2();
        assert_eq!(entropy(&FinSuppMeasure::point_mass(g.identity())), 0.0);
        let m = FinSuppMeasure::weighted(&fixtures::z2_translations(), &[0.5, 0.25, 0.25, 0.0]);
        assert!(m.is_err());
        let g3 = crate::groups::MarkedGroup::new(
            "three",
            g.generators()[..3].iter().map(|e| *e.isometry()).collect(),
        )
        .unwrap();
        let m = FinSuppMeasure::weighted(&g3, &[0.5, 0.25, 0.25]).unwrap();
        assert!((entropy(&m) - 1.5 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn identity_is_neutral() {
        let (g, m) = free();
        let d = FinSuppMeasure::point_mass(g.identity());
        let c = convolve(&d, &m, &ConvolveOptions::default()).unwrap();
        assert_eq!(c.len(), m.len());
        for (e, p) in m.atoms() {
            assert!((c.mass_of(e.isometry()).unwrap() - p).abs() < 1e-12);
        }
    }

    #[test]
    fn involution_squares_to_identity() {
        let g = fixtures::dihedral(Label::Finite(6)).unwrap();
        let r = FinSuppMeasure::point_mass(g.generators()[0].clone());
        let c = convolve(&r, &r, &ConvolveOptions::default()).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c.mass_of(g.identity().isometry()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cyclic_path_counting() {
        let g = fixtures::hyperbolic_cyclic();
        let m = FinSuppMeasure::uniform_on_generators(&g).unwrap();
        let c = convolve(&m, &m, &ConvolveOptions::default()).unwrap();
        assert_eq!(c.len(), 3);
        let a2 = g.evaluate(&"1 1".parse().unwrap()).unwrap();
        let b2 = g.evaluate(&"2 2".parse().unwrap()).unwrap();
        assert!((c.mass_of(&a2).unwrap() - 0.25).abs() < 1e-15);
        assert!((c.mass_of(&b2).unwrap() - 0.25).abs() < 1e-15);
        assert!((c.mass_of(g.identity().isometry()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn support_cap_is_enforced() {
        let (_, m) = free();
        let opts = ConvolveOptions {
            support_cap: 10,
            ..Default::default()
        };
        assert!(matches!(
            convolve(&m, &m, &opts),
            Err(MeasureError::SupportOverflow { cap: 10, .. })
        ));
    }

    #[test]
    fn pruning_reports_dropped_mass() {
        let g = fixtures::hyperbolic_cyclic();
        let m = FinSuppMeasure::weighted(&g, &[1.0 - 1e-9, 1e-9]).unwrap();
        let opts = ConvolveOptions {
            prune_floor: 1e-15,
            ..Default::default()
        };
        let c = convolve(&m, &m, &opts).unwrap();
        assert_eq!(c.len(), 2);
        assert!((c.dropped_mass() - 1e-18).abs() < 1e-20);
        assert!((c.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pushforward_to_abelian_quotient() {
        let (free, m) = free();
        let z2 = fixtures::z2_translations();
        let id = [0, 1, 2, 3];
        let p = pushforward(&m, &z2, &id).unwrap();
        assert_eq!(p.len(), 4);
        let opts = ConvolveOptions {
            keep_words: true,
            ..Default::default()
        };
        let m2 = convolve(&m, &m, &opts).unwrap();
        let p2 = pushforward(&m2, &z2, &id).unwrap();
        assert!((entropy(&p2) - 3.0 * 2f64.ln()).abs() < 1e-12);
        assert!((entropy(&m2) - 3.5 * 2f64.ln()).abs() < 1e-12);
        assert!((p2.total_mass() - 1.0).abs() < 1e-15);
        let same = pushforward(&m, &free, &id).unwrap();
        assert_eq!(same.len(), m.len());
        assert!(pushforward(&m, &z2, &[0, 0, 1, 2]).is_err());
        let no_words = convolve(&m, &m, &ConvolveOptions::default()).unwrap();
        assert!(matches!(pushforward(&no_words, &z2, &id), Err(MeasureError::MissingWord(_))));
    }

    #[test]
    fn nondegeneracy_probe() {
        let (g, m) = free();
        assert_eq!(is_nondegenerate(&m, &g, 4, &Limits::DEFAULT).unwrap(), Nondegeneracy::Yes);
        let d = fixtures::dihedral(Label::Infinity).unwrap();
        let r1 = FinSuppMeasure::point_mass(d.generators()[0].clone());
        assert_eq!(is_nondegenerate(&r1, &d, 4, &Limits::DEFAULT).unwrap(), Nondegeneracy::Unknown);
        let both = FinSuppMeasure::uniform_on_generators(&d).unwrap();
        assert_eq!(is_nondegenerate(&both, &d, 4, &Limits::DEFAULT).unwrap(), Nondegeneracy::Yes);
    }
}
