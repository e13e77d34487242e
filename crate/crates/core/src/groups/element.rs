use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashMap;

use super::GroupError;
use crate::hypgeom::{Isometry, ModelTag};
use crate::tolerance::Tolerances;

/// Sequence of generator indices, stored 0-based and written 1-based
/// (`"1 3 2"`).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<u16>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u16] {
        &self.0
    }

    /// `self` followed by `rhs`.
    pub fn concat(&self, rhs: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + rhs.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&rhs.0);
        Word(v)
    }

    pub fn push(&self, letter: u16) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", l + 1)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() || t == "e" {
            return Ok(Word::empty());
        }
        t.split_whitespace()
            .map(|tok| match tok.parse::<u16>() {
                Ok(k) if k >= 1 => Ok(k - 1),
                _ => Err(GroupError::BadWord(format!("bad generator index {tok:?} in {t:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

/// 64-bit fingerprint of the quantized, canonicalized matrix entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementKey(pub u64);

const MAX_PROBED: usize = 6;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn tag_seed(tag: ModelTag) -> u64 {
    match tag {
        ModelTag::Uhp2 => 0x51,
        ModelTag::Uhs3 => 0x52,
        ModelTag::Lorentz(d) => 0x60 + d as u64,
    }
}

/// Quantization rule for canonical keys: entries are rounded to a grid and
/// entries within the probe margin of a cell boundary are also looked up in
/// the adjacent cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyScheme {
    pub grid: f64,
    pub probe: f64,
    pub audit: f64,
}

impl Default for KeyScheme {
    fn default() -> Self {
        Self::from_tolerances(&Tolerances::DEFAULT)
    }
}

impl KeyScheme {
    pub fn from_tolerances(t: &Tolerances) -> Self {
        Self {
            grid: t.key_grid,
            probe: t.key_probe,
            audit: t.key_audit,
        }
    }

    fn hash(tag: ModelTag, q: &[i64]) -> u64 {
        let mut h = mix(tag_seed(tag));
        for &v in q {
            h = mix(h ^ (v as u64));
        }
        h
    }

    fn quantize(&self, flat: &[f64], q: &mut [i64; 16]) -> ([usize; MAX_PROBED], [i64; MAX_PROBED], usize) {
        let mut amb = [0usize; MAX_PROBED];
        let mut alt = [0i64; MAX_PROBED];
        let mut na = 0;
        for (k, &x) in flat.iter().enumerate() {
            let s = x / self.grid;
            let r = s.round();
            q[k] = r as i64;
            let frac = s - r;
            let margin = (self.probe + 1e-14 * x.abs()) / self.grid;
            if na < MAX_PROBED && 0.5 - frac.abs() < margin {
                amb[na] = k;
                alt[na] = if frac > 0.0 { q[k] + 1 } else { q[k] - 1 };
                na += 1;
            }
        }
        (amb, alt, na)
    }

    pub fn key(&self, g: &Isometry) -> ElementKey {
        let mut flat = [0.0; 16];
        let n = g.write_flat(&mut flat);
        let mut q = [0i64; 16];
        self.quantize(&flat[..n], &mut q);
        ElementKey(Self::hash(g.tag(), &q[..n]))
    }

    /// Primary key first, then the keys of neighbouring cells for entries
    /// near a cell boundary (at most `2^6` in total).
    pub fn candidates(&self, g: &Isometry, out: &mut Vec<u64>) {
        out.clear();
        let mut flat = [0.0; 16];
        let n = g.write_flat(&mut flat);
        let mut q = [0i64; 16];
        let (amb, alt, na) = self.quantize(&flat[..n], &mut q);
        let tag = g.tag();
        out.push(Self::hash(tag, &q[..n]));
        for mask in 1u32..(1 << na) {
            let mut qq = q;
            for b in 0..na {
                if mask & (1 << b) != 0 {
                    qq[amb[b]] = alt[b];
                }
            }
            out.push(Self::hash(tag, &qq[..n]));
        }
    }
}

/// A canonicalized isometry with an optional word in the generators.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    iso: Isometry,
    word: Option<Word>,
    key: ElementKey,
}

impl GroupElement {
    pub fn new(iso: Isometry, word: Option<Word>) -> Self {
        let key = KeyScheme::default().key(&iso);
        Self { iso, word, key }
    }

    pub(crate) fn with_key(iso: Isometry, word: Option<Word>, key: ElementKey) -> Self {
        Self { iso, word, key }
    }

    pub fn identity(tag: ModelTag) -> Result<Self, GroupError> {
        Ok(Self::new(Isometry::identity(tag)?, Some(Word::empty())))
    }

    pub fn isometry(&self) -> &Isometry {
        &self.iso
    }

    pub fn word(&self) -> Option<&Word> {
        self.word.as_ref()
    }

    pub fn key(&self) -> ElementKey {
        self.key
    }

    pub fn without_word(mut self) -> Self {
        self.word = None;
        self
    }

    /// `self · rhs`; words concatenate when both are present.
    pub fn compose(&self, rhs: &GroupElement) -> Result<GroupElement, GroupError> {
        let iso = self.iso.compose(&rhs.iso)?;
        let word = match (&self.word, &rhs.word) {
            (Some(a), Some(b)) => Some(a.concat(b)),
            _ => None,
        };
        Ok(GroupElement::new(iso, word))
    }
}

/// Deduplicating store of group elements keyed by [`KeyScheme`], with the
/// collision audit applied on every hit.
#[derive(Debug, Clone)]
pub struct ElementIndex {
    scheme: KeyScheme,
    map: FxHashMap<u64, u32>,
    elements: Vec<GroupElement>,
    scratch: Vec<u64>,
}

impl ElementIndex {
    pub fn new(scheme: KeyScheme) -> Self {
        Self {
            scheme,
            map: FxHashMap::default(),
            elements: Vec::new(),
            scratch: Vec::new(),
        }
    }

    pub fn with_capacity(scheme: KeyScheme, n: usize) -> Self {
        let mut s = Self::new(scheme);
        s.map.reserve(n);
        s.elements.reserve(n);
        s
    }

    pub fn scheme(&self) -> &KeyScheme {
        &self.scheme
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    pub fn into_elements(self) -> Vec<GroupElement> {
        self.elements
    }

    fn audit(&self, slot: u32, g: &Isometry, key: u64) -> Result<usize, GroupError> {
        let other = &self.elements[slot as usize];
        let dist = other.isometry().distance_to(g);
        if dist > self.scheme.audit {
            return Err(GroupError::Collision {
                key,
                distance: dist,
                left: format!("{:?}", other.isometry()),
                right: format!("{g:?}"),
            });
        }
        Ok(slot as usize)
    }

    fn locate_with(&self, g: &Isometry, cands: &mut Vec<u64>) -> Result<(Option<usize>, u64), GroupError> {
        self.scheme.candidates(g, cands);
        for &k in cands.iter() {
            if let Some(&slot) = self.map.get(&k) {
                return Ok((Some(self.audit(slot, g, k)?), cands[0]));
            }
        }
        Ok((None, cands[0]))
    }

    /// Index of an element equal to `g` (within the grid), if present.
    pub fn find(&self, g: &Isometry) -> Result<Option<usize>, GroupError> {
        Ok(self.locate_with(g, &mut Vec::new())?.0)
    }

    /// Inserts `g` unless an equal element is present. Returns the slot and
    /// whether it was newly inserted.
    pub fn insert_isometry(
        &mut self,
        g: Isometry,
        word: impl FnOnce() -> Option<Word>,
    ) -> Result<(usize, bool), GroupError> {
        let mut cands = std::mem::take(&mut self.scratch);
        let located = self.locate_with(&g, &mut cands);
        self.scratch = cands;
        let (hit, primary) = located?;
        if let Some(i) = hit {
            return Ok((i, false));
        }
        let slot = self.elements.len();
        self.map.insert(primary, slot as u32);
        self.elements
            .push(GroupElement::with_key(g, word(), ElementKey(primary)));
        Ok((slot, true))
    }

    pub fn insert(&mut self, e: GroupElement) -> Result<(usize, bool), GroupError> {
        let GroupElement { iso, word, .. } = e;
        self.insert_isometry(iso, move || word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypgeom::{LorentzIsometry, LorentzVector, MoebiusIsometry};
    use num_complex::Complex64;

    #[test]
    fn word_roundtrip() {
        let w: Word = "1 3 2".parse().unwrap();
        assert_eq!(w.letters(), &[0, 2, 1]);
        assert_eq!(w.to_string(), "1 3 2");
        assert!("0 1".parse::<Word>().is_err());
        assert_eq!("e".parse::<Word>().unwrap(), Word::empty());
    }

    #[test]
    fn key_ignores_sign() {
        let m = MoebiusIsometry::real(2.0, 1.0, 3.0, 2.0).unwrap();
        let n = MoebiusIsometry::real(-2.0, -1.0, -3.0, -2.0).unwrap();
        let s = KeyScheme::default();
        assert_eq!(s.key(&m.into()), s.key(&n.into()));
        let c = |re| Complex64::new(re, 0.0);
        let i = Complex64::i();
        let a = MoebiusIsometry::new(crate::hypgeom::MoebiusModel::Uhs3, i, c(1.0), c(0.0), -i).unwrap();
        let b = MoebiusIsometry::new(crate::hypgeom::MoebiusModel::Uhs3, -i, c(-1.0), c(0.0), i).unwrap();
        assert_eq!(s.key(&a.into()), s.key(&b.into()));
    }

    #[test]
    fn reflection_squared_has_identity_key() {
        let r = LorentzIsometry::reflection(&LorentzVector::new(&[0.3, 1.0, 0.2]).unwrap()).unwrap();
        let rr = r.compose(&r);
        let s = KeyScheme::default();
        assert_eq!(s.key(&rr.into()), s.key(&LorentzIsometry::identity(2).unwrap().into()));
    }

    #[test]
    fn boundary_noise_is_probed() {
        let s = KeyScheme::default();
        // 0.5 grid cells plus/minus float noise rounds to different cells.
        let x = 0.5e-8;
        let a = MoebiusIsometry::real(1.0, x + 1e-13, 0.0, 1.0).unwrap();
        let b = MoebiusIsometry::real(1.0, x - 1e-13, 0.0, 1.0).unwrap();
        assert_ne!(s.key(&a.into()), s.key(&b.into()));
        let mut idx = ElementIndex::new(s);
        let (i, new) = idx.insert_isometry(a.into(), || None).unwrap();
        assert!(new);
        let (j, new) = idx.insert_isometry(b.into(), || None).unwrap();
        assert!(!new);
        assert_eq!(i, j);
    }

    #[test]
    fn audit_catches_forced_collision() {
        // A huge grid puts distinct elements in one cell.
        let s = KeyScheme { grid: 10.0, probe: 1e-10, audit: 1e-6 };
        let mut idx = ElementIndex::new(s);
        idx.insert_isometry(MoebiusIsometry::real(1.0, 1.0, 0.0, 1.0).unwrap().into(), || None)
            .unwrap();
        let r = idx.insert_isometry(MoebiusIsometry::real(1.0, 2.0, 0.0, 1.0).unwrap().into(), || None);
        assert!(matches!(r, Err(GroupError::Collision { .. })));
    }
}
