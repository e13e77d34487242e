use std::fmt;
use std::str::FromStr;

use super::GroupError;

/// Edge label `m_ij` of a Coxeter diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Finite(u32),
    Infinity,
}

impl Label {
    /// `-cos(π/m)`, and `-1` for `∞`.
    pub fn gram_entry(&self) -> f64 {
        match *self {
            Label::Finite(m) => -(std::f64::consts::PI / m as f64).cos(),
            Label::Infinity => -1.0,
        }
    }

    /// `1/m`, with `1/∞ = 0`.
    pub fn reciprocal(&self) -> f64 {
        match *self {
            Label::Finite(m) => 1.0 / m as f64,
            Label::Infinity => 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Label::Finite(_))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Finite(m) => write!(f, "{m}"),
            Label::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Label {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Label::Infinity),
            _ => t
                .parse::<u32>()
                .map(Label::Finite)
                .map_err(|_| GroupError::Parse(format!("bad label {t:?}"))),
        }
    }
}

/// Symmetric matrix of labels with `m_ii = 1` and `m_ij >= 2` off the
/// diagonal, plus the ambient hyperbolic dimension.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoxeterDiagram {
    labels: Vec<Vec<Label>>,
    dim: usize,
}

impl CoxeterDiagram {
    /// Checks symmetry and the label range. `dim` defaults to
    /// `max(m - 1, 2)` when `None`.
    pub fn new(labels: Vec<Vec<Label>>, dim: Option<usize>) -> Result<Self, GroupError> {
        let m = labels.len();
        if m < 2 {
            return Err(GroupError::Parse("a diagram needs at least two nodes".into()));
        }
        for (i, row) in labels.iter().enumerate() {
            if row.len() != m {
                return Err(GroupError::Parse(format!("row {} has {} entries, expected {m}", i + 1, row.len())));
            }
            for (j, l) in row.iter().enumerate() {
                if i == j {
                    if *l != Label::Finite(1) {
                        return Err(GroupError::Parse(format!("diagonal entry {} must be 1", i + 1)));
                    }
                } else {
                    if labels[j][i] != *l {
                        return Err(GroupError::Parse(format!("labels ({}, {}) not symmetric", i + 1, j + 1)));
                    }
                    if let Label::Finite(v) = l {
                        if *v < 2 {
                            return Err(GroupError::Parse(format!(
                                "off-diagonal label ({}, {}) must be >= 2",
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                }
            }
        }
        let dim = dim.unwrap_or_else(|| (m - 1).max(2));
        if !(2..=3).contains(&dim) || m > dim + 1 {
            return Err(GroupError::Parse(format!(
                "{m} walls in dimension {dim}: only simplices and smaller configurations in d = 2, 3"
            )));
        }
        Ok(Self { labels, dim })
    }

    /// Triangle diagram with `m_12 = p`, `m_23 = q`, `m_13 = n`.
    pub fn triangle(p: Label, q: Label, n: Label) -> Result<Self, GroupError> {
        let one = Label::Finite(1);
        Self::new(vec![vec![one, p, n], vec![p, one, q], vec![n, q, one]], Some(2))
    }

    /// Two nodes joined by label `m`.
    pub fn dihedral(m: Label) -> Result<Self, GroupError> {
        let one = Label::Finite(1);
        Self::new(vec![vec![one, m], vec![m, one]], Some(2))
    }

    /// Plain-text matrix, one row per line, whitespace-separated, `inf` for
    /// `∞`. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, GroupError> {
        let mut rows = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            rows.push(line.split_whitespace().map(str::parse).collect::<Result<Vec<Label>, _>>()?);
        }
        Self::new(rows, None)
    }

    /// Inline triangle form `"p,q,n"`.
    pub fn parse_triangle(s: &str) -> Result<Self, GroupError> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(GroupError::Parse(format!("expected \"p,q,n\", got {s:?}")));
        }
        let l = parts.iter().map(|p| p.parse()).collect::<Result<Vec<Label>, _>>()?;
        Self::triangle(l[0], l[1], l[2])
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self, i: usize, j: usize) -> Label {
        self.labels[i][j]
    }

    /// Copy with label `(i, j)` (and `(j, i)`) replaced.
    pub fn with_label(&self, i: usize, j: usize, l: Label) -> Result<Self, GroupError> {
        if i == j || i >= self.size() || j >= self.size() {
            return Err(GroupError::Parse(format!("no edge ({}, {})", i + 1, j + 1)));
        }
        let mut labels = self.labels.clone();
        labels[i][j] = l;
        labels[j][i] = l;
        Self::new(labels, Some(self.dim))
    }

    /// `G_ii = 1`, `G_ij = -cos(π/m_ij)`.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let m = self.size();
        (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j { 1.0 } else { self.labels[i][j].gram_entry() })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for CoxeterDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, row) in self.labels.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|l| l.to_string()).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_matrix_with_infinity() {
        let d = CoxeterDiagram::parse("1 inf\ninf 1\n").unwrap();
        assert_eq!(d.size(), 2);
        assert_eq!(d.dim(), 2);
        assert_eq!(d.label(0, 1), Label::Infinity);
        assert_eq!(d.gram()[0][1], -1.0);
        assert_eq!(CoxeterDiagram::parse(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn inline_triangle() {
        let d = CoxeterDiagram::parse_triangle("2,3,7").unwrap();
        assert_eq!(d.label(0, 1), Label::Finite(2));
        assert_eq!(d.label(1, 2), Label::Finite(3));
        assert_eq!(d.label(0, 2), Label::Finite(7));
        assert!(CoxeterDiagram::parse_triangle("2,3").is_err());
    }

    #[test]
    fn rejects_malformed() {
        assert!(CoxeterDiagram::parse("1 2\n3 1").is_err());
        assert!(CoxeterDiagram::parse("1 1\n1 1").is_err());
        assert!(CoxeterDiagram::parse("2 3\n3 1").is_err());
        assert!(CoxeterDiagram::parse("1 x\nx 1").is_err());
    }

    #[test]
    fn relabel_edge() {
        let d = CoxeterDiagram::parse_triangle("2,3,7").unwrap();
        let e = d.with_label(0, 2, Label::Infinity).unwrap();
        assert_eq!(e.label(2, 0), Label::Infinity);
        assert_eq!(e.label(0, 1), Label::Finite(2));
    }
}
