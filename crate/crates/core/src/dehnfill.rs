//! Coxeter families `Γ_n` obtained by varying the label `n` on one edge of
//! a diagram, with measures whose weights do not depend on `n`.
//!
//! The member with label `∞` is the limit group `Γ`; a finite member is the
//! quotient of `Γ` by the normal closure of `(r_i r_j)^n`. The exact
//! entropy harness compares convolution powers on both.

use thiserror::Error;

use crate::estimators::{entropy_upper_sequence, EstimatorError, GroupFamily};
use crate::groups::{vinberg_realize, CoxeterDiagram, GroupError, Label, MarkedGroup};
use crate::measures::{parse_mass, ConvolveOptions, FinSuppMeasure, MeasureError};
use crate::tolerance::Limits;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DehnFillError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error("family file: {0}")]
    Parse(String),
    #[error("invalid family: {0}")]
    Invalid(String),
    #[error("label {0} is not a member of the family")]
    NotInFamily(Label),
    #[error("the family has no limit member (n = inf)")]
    NoLimit,
    #[error("entropy of the quotient exceeds the limit group at level {k} by {excess:e}")]
    NegativeSlack { k: usize, excess: f64 },
}

/// Base diagram, marked edge, parameter values and generator weights.
#[derive(Debug, Clone, PartialEq)]
pub struct CoxeterFamily {
    name: String,
    diagram: CoxeterDiagram,
    edge: (usize, usize),
    n_values: Vec<Label>,
    weights: Vec<f64>,
}

impl CoxeterFamily {
    /// Sorts and deduplicates `n_values` (`∞` last) and checks the edge and
    /// the weights. Labels below 6 are accepted; see
    /// [`outside_hypothesis`](Self::outside_hypothesis).
    pub fn new(
        name: impl Into<String>,
        diagram: CoxeterDiagram,
        edge: (usize, usize),
        mut n_values: Vec<Label>,
        weights: Vec<f64>,
    ) -> Result<Self, DehnFillError> {
        let (i, j) = edge;
        if i == j || i >= diagram.size() || j >= diagram.size() {
            return Err(DehnFillError::Invalid(format!("no edge ({}, {})", i + 1, j + 1)));
        }
        if weights.len() != diagram.size() {
            return Err(DehnFillError::Invalid(format!(
                "{} weights for {} generators",
                weights.len(),
                diagram.size()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(DehnFillError::Invalid("weights must be strictly positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(DehnFillError::Invalid(format!("weights sum to {total}, not 1")));
        }
        if n_values.iter().any(|l| *l < Label::Finite(2)) {
            return Err(DehnFillError::Invalid("edge labels must be >= 2".into()));
        }
        n_values.sort();
        n_values.dedup();
        Ok(Self {
            name: name.into(),
            diagram,
            edge,
            n_values,
            weights,
        })
    }

    /// `(p, q, n)` triangle groups, `n` on the edge between generators 1 and
    /// 3, uniform weights.
    pub fn triangle(p: u32, q: u32, n_values: Vec<Label>) -> Result<Self, DehnFillError> {
        let d = CoxeterDiagram::triangle(Label::Finite(p), Label::Finite(q), Label::Infinity)?;
        Self::new(format!("({p},{q},n)"), d, (0, 2), n_values, vec![1.0 / 3.0; 3])
    }

    /// Dihedral group of order `2n` against the infinite dihedral group.
    pub fn dihedral(n: u32) -> Result<Self, DehnFillError> {
        Self::new(
            "dihedral",
            CoxeterDiagram::dihedral(Label::Infinity)?,
            (0, 1),
            vec![Label::Finite(n), Label::Infinity],
            vec![0.5, 0.5],
        )
    }

    /// Parses a family description:
    ///
    /// ```text
    /// name (2,3,n)
    /// 1 2 n
    /// 2 1 3
    /// n 3 1
    /// edge 1 3
    /// n-values 7 10 20 50 inf
    /// weights 1/3 1/3 1/3
    /// ```
    ///
    /// Lines that are not keyword lines form the diagram matrix. The token
    /// `n` may stand for the varying label; it then also fixes the edge when
    /// no `edge` line is given. Indices are 1-based. The `weights` line is
    /// required.
    pub fn parse(text: &str) -> Result<Self, DehnFillError> {
        let mut name = String::from("family");
        let mut rows: Vec<String> = Vec::new();
        let mut edge = None;
        let mut n_values = None;
        let mut weights = None;
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() || line.eq_ignore_ascii_case("[family]") || line.eq_ignore_ascii_case("[diagram]") {
                continue;
            }
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match head.to_ascii_lowercase().as_str() {
                "name" => name = rest.trim().to_string(),
                "edge" => {
                    let ij = rest
                        .split_whitespace()
                        .map(|t| t.parse::<usize>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| DehnFillError::Parse(format!("bad edge line {line:?}")))?;
                    match ij[..] {
                        [i, j] if i >= 1 && j >= 1 => edge = Some((i - 1, j - 1)),
                        _ => return Err(DehnFillError::Parse(format!("bad edge line {line:?}"))),
                    }
                }
                "n-values" => {
                    n_values = Some(
                        rest.split_whitespace()
                            .map(str::parse)
                            .collect::<Result<Vec<Label>, _>>()?,
                    )
                }
                "weights" => {
                    weights = Some(
                        rest.split_whitespace()
                            .map(parse_mass)
                            .collect::<Result<Vec<f64>, _>>()?,
                    )
                }
                _ => rows.push(line.to_string()),
            }
        }
        let mut placeholder = None;
        let mut matrix = String::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, tok) in row.split_whitespace().enumerate() {
                if tok == "n" {
                    if i < j {
                        placeholder = Some((i, j));
                    }
                    matrix.push_str("inf ");
                } else {
                    matrix.push_str(tok);
                    matrix.push(' ');
                }
            }
            matrix.push('\n');
        }
        let diagram = CoxeterDiagram::parse(&matrix)?;
        let edge = edge
            .or(placeholder)
            .ok_or_else(|| DehnFillError::Parse("missing \"edge i j\" line".into()))?;
        let n_values = n_values.ok_or_else(|| DehnFillError::Parse("missing \"n-values\" line".into()))?;
        let weights = weights.ok_or_else(|| DehnFillError::Parse("missing \"weights\" line".into()))?;
        Self::new(name, diagram, edge, n_values, weights)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn diagram(&self) -> &CoxeterDiagram {
        &self.diagram
    }

    pub fn edge(&self) -> (usize, usize) {
        self.edge
    }

    pub fn n_values(&self) -> &[Label] {
        &self.n_values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn has_limit(&self) -> bool {
        self.n_values.last() == Some(&Label::Infinity)
    }

    /// Members with `n < 6`, where adjacent angles need not be right.
    pub fn outside_hypothesis(&self) -> Vec<Label> {
        self.n_values.iter().copied().filter(|l| *l < Label::Finite(6)).collect()
    }

    /// Diagram of the member with label `n`.
    pub fn member_diagram(&self, n: Label) -> Result<CoxeterDiagram, DehnFillError> {
        Ok(self.diagram.with_label(self.edge.0, self.edge.1, n)?)
    }
}

/// Realizes the member with label `n` and puts weight `p_i` on generator `i`.
pub fn instantiate(family: &CoxeterFamily, n: Label) -> Result<(MarkedGroup, FinSuppMeasure), DehnFillError> {
    if !family.n_values.contains(&n) {
        return Err(DehnFillError::NotInFamily(n));
    }
    let group = vinberg_realize(&family.member_diagram(n)?)?.with_marked_edge(family.edge);
    let mu = FinSuppMeasure::weighted(&group, &family.weights)?;
    Ok((group, mu))
}

/// Two members with the measures induced by the same weighted word measure,
/// related by the generator correspondence `i ↦ i`.
#[derive(Debug, Clone)]
pub struct CompatiblePair {
    pub left: (MarkedGroup, FinSuppMeasure),
    pub right: (MarkedGroup, FinSuppMeasure),
    pub correspondence: Vec<usize>,
}

pub fn compatible_pair(family: &CoxeterFamily, n: Label, m: Label) -> Result<CompatiblePair, DehnFillError> {
    Ok(CompatiblePair {
        left: instantiate(family, n)?,
        right: instantiate(family, m)?,
        correspondence: (0..family.diagram.size()).collect(),
    })
}

/// Exact entropies at level `k` on the limit group and on a quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityRow {
    pub k: usize,
    pub h_limit: f64,
    pub h_member: f64,
    /// `h_limit - h_member`; non-negative for a quotient.
    pub slack: f64,
}

/// Compares `H(μ_∞^{*k})` with `H(μ_n^{*k})` for `k = 1..=k_max` and fails
/// on the first slack below `-1e-9`, which would mean two distinct elements
/// of the quotient were keyed as one element of the limit group or similar.
pub fn monotonicity_harness(
    family: &CoxeterFamily,
    n: Label,
    k_max: usize,
    opts: &ConvolveOptions,
    limits: &Limits,
) -> Result<Vec<MonotonicityRow>, DehnFillError> {
    if !family.has_limit() {
        return Err(DehnFillError::NoLimit);
    }
    let (_, mu_inf) = instantiate(family, Label::Infinity)?;
    let (_, mu_n) = instantiate(family, n)?;
    let (a, b) = rayon::join(
        || entropy_upper_sequence(&mu_inf, k_max, opts, limits),
        || entropy_upper_sequence(&mu_n, k_max, opts, limits),
    );
    let (a, b) = (a?, b?);
    let mut rows = Vec::with_capacity(k_max);
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        let slack = ra.h - rb.h;
        if slack < -1e-9 {
            return Err(DehnFillError::NegativeSlack { k: ra.n, excess: -slack });
        }
        rows.push(MonotonicityRow {
            k: ra.n,
            h_limit: ra.h,
            h_member: rb.h,
            slack,
        });
    }
    Ok(rows)
}

impl From<DehnFillError> for EstimatorError {
    fn from(e: DehnFillError) -> Self {
        match e {
            DehnFillError::Group(g) => EstimatorError::Group(g),
            DehnFillError::Measure(m) => EstimatorError::Measure(m),
            DehnFillError::Estimator(e) => e,
            other => EstimatorError::Config(other.to_string()),
        }
    }
}

impl GroupFamily for CoxeterFamily {
    fn params(&self) -> Vec<Label> {
        self.n_values.clone()
    }

    fn instantiate_member(&self, n: Label) -> Result<(MarkedGroup, FinSuppMeasure), EstimatorError> {
        Ok(instantiate(self, n)?)
    }
}
