use super::{FinSuppMeasure, MeasureError};
use crate::groups::{MarkedGroup, Word};

/// Decimal or `a/b` fraction.
pub fn parse_mass(s: &str) -> Result<f64, MeasureError> {
    let t = s.trim();
    let v = match t.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| MeasureError::Parse(format!("bad mass {t:?}")))?;
            let b: f64 = b.trim().parse().map_err(|_| MeasureError::Parse(format!("bad mass {t:?}")))?;
            a / b
        }
        None => t.parse().map_err(|_| MeasureError::Parse(format!("bad mass {t:?}")))?,
    };
    Ok(v)
}

/// Reads a measure on `group` from text. Accepted forms (one per text):
///
/// * `uniform-on-generators`
/// * `weights p_1 ... p_m`
/// * lines `word : mass`, e.g. `1 3 2 : 0.25`, with `e` for the identity.
///
/// Blank lines and `#` comments are skipped.
pub fn parse_measure(text: &str, group: &MarkedGroup) -> Result<FinSuppMeasure, MeasureError> {
    let lines: Vec<&str> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .collect();
    match lines.as_slice() {
        [] => Err(MeasureError::Parse("empty measure".into())),
        ["uniform-on-generators"] => FinSuppMeasure::uniform_on_generators(group),
        [w] if w.starts_with("weights") => {
            let ws = w["weights".len()..]
                .split_whitespace()
                .map(parse_mass)
                .collect::<Result<Vec<_>, _>>()?;
            FinSuppMeasure::weighted(group, &ws)
        }
        _ => {
            let mut atoms = Vec::new();
            for l in lines {
                let (w, m) = l
                    .split_once(':')
                    .ok_or_else(|| MeasureError::Parse(format!("expected \"word : mass\", got {l:?}")))?;
                let word: Word = w.parse()?;
                atoms.push((group.element(&word)?, parse_mass(m)?));
            }
            FinSuppMeasure::from_atoms(group.key_scheme(), atoms, group.tolerances())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::fixtures;
    use crate::measures::entropy;

    #[test]
    fn three_forms() {
        let g = fixtures::free_group_gamma2();
        let u = parse_measure("uniform-on-generators\n", &g).unwrap();
        assert_eq!(u.len(), 4);
        let w = parse_measure("# comment\nweights 1/2 1/4 1/8 1/8", &g).unwrap();
        assert!((w.masses()[0] - 0.5).abs() < 1e-15);
        let a = parse_measure("1 : 1/2\n3 : 0.25\n1 2 3 : 0.25\n", &g).unwrap();
        // "1 2" is a·a⁻¹ = e, so "1 2 3" equals "3" and merges.
        assert_eq!(a.len(), 2);
        assert!((entropy(&a) - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let g = fixtures::free_group_gamma2();
        assert!(parse_measure("", &g).is_err());
        assert!(parse_measure("weights 0.5 0.5", &g).is_err());
        assert!(parse_measure("1 : 0.6\n2 : 0.6", &g).is_err());
        assert!(parse_measure("9 : 1", &g).is_err());
        assert!(parse_measure("1 0.5", &g).is_err());
    }
}
