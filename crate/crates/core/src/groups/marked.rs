use super::diagram::{CoxeterDiagram, Label};
use super::element::{ElementIndex, GroupElement, KeyScheme, Word};
use super::GroupError;
use crate::hypgeom::{Isometry, LorentzVector, ModelTag};
use crate::tolerance::{Limits, Tolerances};

/// A finitely generated matrix group with an ordered generating set.
#[derive(Debug, Clone)]
pub struct MarkedGroup {
    name: String,
    tag: ModelTag,
    generators: Vec<GroupElement>,
    diagram: Option<CoxeterDiagram>,
    marked_edge: Option<(usize, usize)>,
    normals: Vec<LorentzVector>,
    tol: Tolerances,
}

impl MarkedGroup {
    /// Generators must share one model and be pairwise distinct.
    pub fn new(name: impl Into<String>, generators: Vec<Isometry>) -> Result<Self, GroupError> {
        let first = generators.first().ok_or(GroupError::EmptyGenerators)?;
        let tag = first.tag();
        let mut index = ElementIndex::new(KeyScheme::default());
        let mut gens = Vec::with_capacity(generators.len());
        for (k, g) in generators.into_iter().enumerate() {
            if g.tag() != tag {
                return Err(GroupError::ModelMismatch);
            }
            let (slot, new) = index.insert_isometry(g, || None)?;
            if !new {
                return Err(GroupError::DuplicateGenerator(slot + 1, k + 1));
            }
            gens.push(GroupElement::new(g, Some(Word(vec![k as u16]))));
        }
        Ok(Self {
            name: name.into(),
            tag,
            generators: gens,
            diagram: None,
            marked_edge: None,
            normals: Vec::new(),
            tol: Tolerances::DEFAULT,
        })
    }

    pub(crate) fn with_diagram(mut self, d: CoxeterDiagram, normals: Vec<LorentzVector>) -> Self {
        self.diagram = Some(d);
        self.normals = normals;
        self
    }

    pub fn with_marked_edge(mut self, edge: (usize, usize)) -> Self {
        self.marked_edge = Some(edge);
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tag(&self) -> ModelTag {
        self.tag
    }

    pub fn dim(&self) -> usize {
        self.tag.dim()
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &Isometry {
        self.generators[i].isometry()
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn diagram(&self) -> Option<&CoxeterDiagram> {
        self.diagram.as_ref()
    }

    pub fn marked_edge(&self) -> Option<(usize, usize)> {
        self.marked_edge
    }

    /// Unit normals of the mirrors for reflection groups, empty otherwise.
    pub fn normals(&self) -> &[LorentzVector] {
        &self.normals
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn key_scheme(&self) -> KeyScheme {
        KeyScheme::from_tolerances(&self.tol)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::new(Isometry::identity(self.tag).expect("valid tag"), Some(Word::empty()))
    }

    /// Left-to-right product of the generators named by `word`.
    pub fn evaluate(&self, word: &Word) -> Result<Isometry, GroupError> {
        let mut acc = Isometry::identity(self.tag)?;
        for &l in word.letters() {
            let g = self
                .generators
                .get(l as usize)
                .ok_or_else(|| GroupError::BadWord(format!("generator {} out of range", l + 1)))?;
            acc = acc.compose(g.isometry())?;
        }
        Ok(acc)
    }

    pub fn element(&self, word: &Word) -> Result<GroupElement, GroupError> {
        Ok(GroupElement::new(self.evaluate(word)?, Some(word.clone())))
    }
}

/// Max entrywise deviation from the identity for each relator.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    /// `(relator, residual)`.
    pub relators: Vec<(Word, f64)>,
    pub max_residual: f64,
}

/// Evaluates `r_i^2` and `(r_i r_j)^{m_ij}` for finite labels.
pub fn verify_relations(group: &MarkedGroup) -> Result<RelationReport, GroupError> {
    let d = group.diagram().ok_or(GroupError::NoDiagram)?;
    let id = Isometry::identity(group.tag())?;
    let mut relators = Vec::new();
    for i in 0..d.size() {
        relators.push(Word(vec![i as u16, i as u16]));
        for j in (i + 1)..d.size() {
            if let Label::Finite(m) = d.label(i, j) {
                let w = (0..m).flat_map(|_| [i as u16, j as u16]).collect();
                relators.push(Word(w));
            }
        }
    }
    let mut out = Vec::with_capacity(relators.len());
    let mut max = 0.0f64;
    for w in relators {
        let r = group.evaluate(&w)?.distance_to(&id);
        max = max.max(r);
        out.push((w, r));
    }
    Ok(RelationReport {
        relators: out,
        max_residual: max,
    })
}

/// Elements of word length at most `radius`, in breadth-first order, each
/// with the first word found and its displacement `d(o, g·o)`.
#[derive(Debug, Clone)]
pub struct Ball {
    pub radius: usize,
    pub elements: Vec<GroupElement>,
    pub displacements: Vec<f64>,
    /// `sphere_starts[r]` is the index of the first element of word length `r`;
    /// the last entry is the total.
    pub sphere_starts: Vec<usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Number of elements of word length at most `r`.
    pub fn count_within(&self, r: usize) -> usize {
        self.sphere_starts[(r + 1).min(self.sphere_starts.len() - 1)]
    }

    /// Number of elements with `d(o, g·o) <= t`.
    pub fn count_metric(&self, t: f64) -> usize {
        self.displacements.iter().filter(|&&x| x <= t).count()
    }
}

/// Breadth-first closure of right multiplication by generators.
pub fn ball(group: &MarkedGroup, radius: usize, limits: &Limits) -> Result<Ball, GroupError> {
    if radius > limits.ball_radius {
        return Err(GroupError::CapExceeded {
            what: "ball radius",
            value: radius,
            limit: limits.ball_radius,
        });
    }
    let mut index = ElementIndex::new(group.key_scheme());
    index.insert(group.identity())?;
    let mut starts = vec![0, 1];
    for _ in 0..radius {
        let (lo, hi) = (starts[starts.len() - 2], starts[starts.len() - 1]);
        for i in lo..hi {
            let base = index.get(i).clone();
            for (k, g) in group.generators().iter().enumerate() {
                let p = base.isometry().compose(g.isometry())?;
                index.insert_isometry(p, || base.word().map(|w| w.push(k as u16)))?;
                if index.len() > limits.support {
                    return Err(GroupError::CapExceeded {
                        what: "ball size",
                        value: index.len(),
                        limit: limits.support,
                    });
                }
            }
        }
        starts.push(index.len());
    }
    let elements = index.into_elements();
    let displacements = elements.iter().map(|e| e.isometry().displacement()).collect();
    Ok(Ball {
        radius,
        elements,
        displacements,
        sphere_starts: starts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{fixtures, triangle_family};

    #[test]
    fn radius_zero_is_identity() {
        let g = fixtures::free_group_gamma2();
        let b = ball(&g, 0, &Limits::DEFAULT).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.elements[0].word(), Some(&Word::empty()));
        assert!(b.displacements[0].abs() < 1e-12);
    }

    #[test]
    fn infinite_dihedral_growth() {
        let g = fixtures::dihedral(Label::Infinity).unwrap();
        let b = ball(&g, 2, &Limits::DEFAULT).unwrap();
        assert_eq!(b.len(), 5);
        let b = ball(&g, 10, &Limits::DEFAULT).unwrap();
        for r in 1..=10 {
            assert_eq!(b.count_within(r), 2 * r + 1);
        }
    }

    #[test]
    fn free_group_sphere_sizes() {
        let g = fixtures::free_group_gamma2();
        let b = ball(&g, 5, &Limits::DEFAULT).unwrap();
        let sizes: Vec<usize> = (0..=5).map(|r| b.count_within(r)).collect();
        assert_eq!(sizes, vec![1, 5, 17, 53, 161, 485]);
    }

    #[test]
    fn radius_cap() {
        let g = fixtures::free_group_gamma2();
        assert!(matches!(
            ball(&g, 15, &Limits::DEFAULT),
            Err(GroupError::CapExceeded { .. })
        ));
    }

    #[test]
    fn words_reproduce_matrices() {
        let g = triangle_family(Label::Finite(2), Label::Finite(3), Label::Finite(7)).unwrap();
        let b = ball(&g, 8, &Limits::DEFAULT).unwrap();
        for e in &b.elements {
            let m = g.evaluate(e.word().unwrap()).unwrap();
            assert!(m.distance_to(e.isometry()) < 1e-7);
        }
    }

    #[test]
    fn relations_hold_and_detect_perturbation() {
        let g = triangle_family(Label::Finite(2), Label::Finite(3), Label::Finite(7)).unwrap();
        assert!(verify_relations(&g).unwrap().max_residual < 1e-9);
        let mut gens: Vec<Isometry> = g.generators().iter().map(|e| *e.isometry()).collect();
        if let Isometry::Lorentz(l) = &mut gens[2] {
            let mut m = *l.matrix();
            m[(0, 1)] += 1e-3;
            let mut rows = [0.0; 9];
            for i in 0..3 {
                for j in 0..3 {
                    rows[i * 3 + j] = m[(i, j)];
                }
            }
            *l = crate::hypgeom::LorentzIsometry::new_unchecked(2, &rows).unwrap();
        }
        let p = MarkedGroup::new("perturbed", gens)
            .unwrap()
            .with_diagram(g.diagram().unwrap().clone(), Vec::new());
        assert!(verify_relations(&p).unwrap().max_residual > 1e-4);
    }
}
