//! Library results against independent exact computations.

use std::collections::{BTreeMap, HashSet};

use hypwalk_core::estimators::{drift_mc, entropy_upper_sequence, DriftConfig};
use hypwalk_core::groups::{ball, fixtures, triangle_family, ElementIndex, Label, Word};
use hypwalk_core::measures::{ConvolveOptions, FinSuppMeasure};
use hypwalk_core::tolerance::Limits;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Element `a + bλ + cλ²` of `Z[λ]`, `λ = 2cos(π/7)`, `λ³ = λ² + 2λ - 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
struct Zl([i64; 3]);

impl Zl {
    const ZERO: Zl = Zl([0, 0, 0]);
    const ONE: Zl = Zl([1, 0, 0]);
    const LAMBDA: Zl = Zl([0, 1, 0]);

    fn add(self, o: Zl) -> Zl {
        Zl([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }

    fn mul(self, o: Zl) -> Zl {
        let mut p = [0i64; 5];
        for i in 0..3 {
            for j in 0..3 {
                p[i + j] += self.0[i] * o.0[j];
            }
        }
        // λ⁴ = λ·λ³ = λ³ + 2λ² - λ, then fold λ³.
        for k in (3..5).rev() {
            let c = p[k];
            p[k] = 0;
            p[k - 1] += c;
            p[k - 2] += 2 * c;
            p[k - 3] -= c;
        }
        Zl([p[0], p[1], p[2]])
    }
}

type M3 = [[Zl; 3]; 3];

fn mat_mul(a: &M3, b: &M3) -> M3 {
    let mut c = [[Zl::ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = Zl::ZERO;
            for k in 0..3 {
                s = s.add(a[i][k].mul(b[k][j]));
            }
            c[i][j] = s;
        }
    }
    c
}

/// Tits representation of the (2,3,7) triangle group:
/// `σ_i(e_j) = e_j + 2cos(π/m_ij) e_i`, with `m_12 = 2`, `m_23 = 3`,
/// `m_13 = 7`.
fn tits_generators() -> [M3; 3] {
    let two_cos = |i: usize, j: usize| -> Zl {
        match (i.min(j), i.max(j)) {
            (0, 1) => Zl::ZERO,
            (1, 2) => Zl::ONE,
            (0, 2) => Zl::LAMBDA,
            _ => unreachable!(),
        }
    };
    let mut gens = [[[Zl::ZERO; 3]; 3]; 3];
    for (i, g) in gens.iter_mut().enumerate() {
        for j in 0..3 {
            // Column j is the image of e_j.
            g[j][j] = Zl::ONE;
            if i == j {
                g[i][j] = Zl([-1, 0, 0]);
            } else {
                g[i][j] = two_cos(i, j);
            }
        }
    }
    gens
}

fn exact_sphere_sizes(radius: usize) -> Vec<usize> {
    let gens = tits_generators();
    let id: M3 = [[Zl::ONE, Zl::ZERO, Zl::ZERO], [Zl::ZERO, Zl::ONE, Zl::ZERO], [Zl::ZERO, Zl::ZERO, Zl::ONE]];
    let mut seen: HashSet<M3> = HashSet::from([id]);
    let mut frontier = vec![id];
    let mut cumulative = vec![1];
    for _ in 0..radius {
        let mut next = Vec::new();
        for g in &frontier {
            for s in &gens {
                let h = mat_mul(g, s);
                if seen.insert(h) {
                    next.push(h);
                }
            }
        }
        cumulative.push(seen.len());
        frontier = next;
    }
    cumulative
}

fn exact_eval(word: &Word) -> M3 {
    let gens = tits_generators();
    let mut m: M3 = [[Zl::ONE, Zl::ZERO, Zl::ZERO], [Zl::ZERO, Zl::ONE, Zl::ZERO], [Zl::ZERO, Zl::ZERO, Zl::ONE]];
    for &l in word.letters() {
        m = mat_mul(&m, &gens[l as usize]);
    }
    m
}

#[test]
fn triangle_ball_sizes_match_exact_arithmetic() {
    let g = triangle_family(Label::Finite(2), Label::Finite(3), Label::Finite(7)).unwrap();
    let b = ball(&g, 14, &Limits::DEFAULT).unwrap();
    let exact = exact_sphere_sizes(14);
    for r in 0..=14 {
        assert_eq!(b.count_within(r), exact[r], "radius {r}");
    }
    // Spot values of the growth series.
    assert_eq!(exact[1], 4);
    assert_eq!(exact[14], 370);
}

#[test]
fn random_words_dedupe_like_exact_arithmetic() {
    let g = triangle_family(Label::Finite(2), Label::Finite(3), Label::Finite(7)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut exact = HashSet::new();
    let mut index = ElementIndex::new(g.key_scheme());
    for _ in 0..500 {
        let len = rng.random_range(0..=12);
        let w = Word((0..len).map(|_| rng.random_range(0..3u16)).collect());
        exact.insert(exact_eval(&w));
        index.insert_isometry(g.evaluate(&w).unwrap(), || Some(w.clone())).unwrap();
    }
    assert_eq!(index.len(), exact.len());
    assert!(exact.len() < 500);
}

/// Distribution of the simple random walk on the free group after `n` steps,
/// as freely reduced words over `a, A, b, B` (letters 0..4, `x ^ 1` inverts).
fn free_walk_distribution(n: usize) -> BTreeMap<Vec<u8>, f64> {
    let mut dist = BTreeMap::from([(Vec::new(), 1.0)]);
    for _ in 0..n {
        let mut next = BTreeMap::new();
        for (w, p) in &dist {
            for s in 0..4u8 {
                let mut v = w.clone();
                if v.last() == Some(&(s ^ 1)) {
                    v.pop();
                } else {
                    v.push(s);
                }
                *next.entry(v).or_insert(0.0) += p / 4.0;
            }
        }
        dist = next;
    }
    dist
}

#[test]
fn free_group_entropies_match_reduced_words() {
    let g = fixtures::free_group_gamma2();
    let mu = FinSuppMeasure::uniform_on_generators(&g).unwrap();
    let t = entropy_upper_sequence(&mu, 7, &ConvolveOptions::default(), &Limits::DEFAULT).unwrap();
    for row in &t.rows {
        let d = free_walk_distribution(row.n);
        let h: f64 = d.values().map(|p| -p * p.ln()).sum();
        assert_eq!(row.atoms, d.len(), "n = {}", row.n);
        assert!((row.h - h).abs() < 1e-12, "n = {}: {} vs {h}", row.n, row.h);
    }
    assert!((t.rows[1].h - 3.5 * 2f64.ln()).abs() < 1e-12);
}

/// `E|S_n|` for the simple ±1 walk: `n C(n, n/2) / 2^n` for even `n`.
fn mean_abs_simple_walk(n: u64) -> f64 {
    assert!(n % 2 == 0);
    let m = n / 2;
    // log C(2m, m) through a running sum.
    let log_binom: f64 = (1..=m).map(|k| ((m + k) as f64 / k as f64).ln()).sum();
    n as f64 * (log_binom - n as f64 * 2f64.ln()).exp()
}

#[test]
fn sign_walk_drift_matches_reflected_walk() {
    let g = fixtures::hyperbolic_cyclic();
    let mu = FinSuppMeasure::uniform_on_generators(&g).unwrap();
    let steps = 10_000;
    let cfg = DriftConfig {
        steps,
        trials: 400,
        seed: 11,
        trace_every: 0,
    };
    let r = drift_mc(&g, &mu, &cfg).unwrap().report;
    let expected = 4f64.ln() * mean_abs_simple_walk(steps as u64) / steps as f64;
    assert!(r.value.abs() < 0.05);
    assert!(
        (r.value - expected).abs() < 4.0 * r.half_width,
        "{} vs {expected} (hw {})",
        r.value,
        r.half_width
    );
}
