//! Acceptance run: one PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails. Criteria 5 and 7 drive the `hypwalk` binary on the
//! shipped (2,3,n) sweep recipe.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use hypwalk_core::boundary::rn_weight;
use hypwalk_core::dehnfill::{monotonicity_harness, CoxeterFamily};
use hypwalk_core::estimators::{
    drift_mc, entropy_estimate, entropy_upper_sequence, fundamental_diagnostic, trial_rng, DriftConfig, EstimateReport,
    Verdict,
};
use hypwalk_core::groups::{fixtures, triangle_family, Label, MarkedGroup};
use hypwalk_core::hypgeom::{
    busemann, dist_halfspace, dist_hyperboloid, halfspace_to_hyperboloid, BoundaryPoint, HalfSpacePoint, Isometry,
    LorentzIsometry, LorentzVector, MoebiusIsometry, MoebiusModel,
};
use hypwalk_core::measures::{ConvolveOptions, FinSuppMeasure};
use hypwalk_core::tolerance::Limits;
use num_complex::Complex64;
use rand::Rng;

const SLACK_TOL: f64 = 1e-9;
const FREE_DEPTH: usize = 10;
const FREE_REL_TOL: f64 = 0.02;
const DRIFT_STEPS: usize = 2000;
const DRIFT_TRIALS: usize = 4000;
const LATTICE_DEPTH: usize = 10;
const CUSPED_DEPTH: usize = 12;
const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn drift(g: &MarkedGroup, mu: &FinSuppMeasure) -> EstimateReport {
    let cfg = DriftConfig {
        steps: DRIFT_STEPS,
        trials: DRIFT_TRIALS,
        seed: SEED,
        trace_every: 0,
    };
    drift_mc(g, mu, &cfg).expect("drift").report
}

fn entropy_increment(mu: &FinSuppMeasure, depth: usize) -> EstimateReport {
    let t = entropy_upper_sequence(mu, depth, &ConvolveOptions::default(), &Limits::DEFAULT).expect("entropy");
    entropy_estimate(&t).expect("non-empty table")
}

fn uniform(g: &MarkedGroup) -> FinSuppMeasure {
    FinSuppMeasure::uniform_on_generators(g).expect("measure")
}

fn triangle(n: Label) -> MarkedGroup {
    triangle_family(Label::Finite(2), Label::Finite(3), n).expect("triangle group")
}

fn criterion_1() -> Outcome {
    let opts = ConvolveOptions::default();
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();

    let dihedral_n = 6;
    let f = CoxeterFamily::dihedral(dihedral_n).expect("dihedral family");
    match monotonicity_harness(&f, Label::Finite(dihedral_n), 8, &opts, &Limits::DEFAULT) {
        Ok(rows) => {
            for r in rows {
                worst = worst.min(r.slack);
                let ok = if r.k < dihedral_n as usize { r.slack == 0.0 } else { r.slack > 0.0 };
                if !ok {
                    failures.push(format!("dihedral k={} slack={:e}", r.k, r.slack));
                }
            }
        }
        Err(e) => failures.push(format!("dihedral: {e}")),
    }

    let f = CoxeterFamily::triangle(2, 3, vec![Label::Finite(7), Label::Finite(10), Label::Finite(20), Label::Infinity])
        .expect("triangle family");
    for n in [7, 10, 20] {
        match monotonicity_harness(&f, Label::Finite(n), 8, &opts, &Limits::DEFAULT) {
            Ok(rows) => {
                for r in rows {
                    worst = worst.min(r.slack);
                    if r.slack < -SLACK_TOL {
                        failures.push(format!("(2,3,{n}) k={} slack={:e}", r.k, r.slack));
                    }
                }
            }
            Err(e) => failures.push(format!("(2,3,{n}): {e}")),
        }
    }
    let detail = if failures.is_empty() {
        format!("min slack {worst:.3e}, dihedral n={dihedral_n} wraps at k=n")
    } else {
        failures.join("; ")
    };
    outcome(failures.is_empty(), detail)
}

fn criterion_2() -> Outcome {
    let fixtures: Vec<(&str, MarkedGroup)> = vec![
        ("(2,3,7)", triangle(Label::Finite(7))),
        ("(2,3,inf)", triangle(Label::Infinity)),
        ("free(gamma2)", fixtures::free_group_gamma2()),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, g) in &fixtures {
        let mu = uniform(g);
        let v = (g.dim() - 1) as f64;
        let h = entropy_increment(&mu, LATTICE_DEPTH);
        let l = drift(g, &mu);
        let bound = v * (l.value + 3.0 * l.half_width);
        let ok = h.value <= bound;
        pass &= ok;
        parts.push(format!(
            "{name}: dH_{LATTICE_DEPTH}={:.6} {} {:.6}",
            h.value,
            if ok { "<=" } else { ">" },
            bound
        ));
    }
    outcome(pass, parts.join(", "))
}

fn criterion_3() -> Outcome {
    let g = fixtures::free_group_gamma2();
    let h = entropy_increment(&uniform(&g), FREE_DEPTH);
    let target = 0.5 * 3f64.ln();
    let rel = (h.value - target).abs() / target;
    outcome(
        rel <= FREE_REL_TOL,
        format!("dH_{FREE_DEPTH}={:.6}, target {target:.6}, relative error {:.2}%", h.value, 100.0 * rel),
    )
}

fn criterion_4() -> Outcome {
    let g = triangle(Label::Infinity);
    let mu = uniform(&g);
    let h = entropy_increment(&mu, CUSPED_DEPTH);
    let l = drift(&g, &mu);
    let v = EstimateReport::exact((g.dim() - 1) as f64);
    let d = fundamental_diagnostic(&h, &l, &v);
    outcome(
        d.hi < 1.0 && d.verdict == Verdict::SingularIndicated,
        format!(
            "bracket [{:.4}, {:.4}], verdict {} (h={:.6}, l={:.6}+-{:.6}, {} trials)",
            d.lo,
            d.hi,
            d.verdict.name(),
            h.value,
            l.value,
            l.half_width,
            DRIFT_TRIALS
        ),
    )
}

/// Data rows of an emitted CSV, keyed by the header.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).expect("csv written");
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().expect("header").split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<String> {
    let i = header.iter().position(|h| h == name).expect("column present");
    rows.iter().map(|r| r[i].clone()).collect()
}

fn recipe() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../recipes/sweep_237.cfg")
}

fn run_sweep(out: &Path, threads: usize) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_hypwalk"))
        .arg("sweep")
        .arg("--config")
        .arg(recipe())
        .arg("--threads")
        .arg(threads.to_string())
        .arg("--out")
        .arg(out)
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("hypwalk sweep exited with {status}"))
    }
}

fn criterion_5(dir: &Path) -> Outcome {
    let (th, trows) = read_csv(&dir.join("sweep_trend.csv"));
    let params = column(&th, &trows, "family_param");
    let excess: Vec<f64> = column(&th, &trows, "h_excess").iter().map(|s| s.parse().unwrap()).collect();
    let gap: Vec<f64> = column(&th, &trows, "drift_gap").iter().map(|s| s.parse().unwrap()).collect();
    let gap_ci: Vec<f64> = column(&th, &trows, "drift_gap_ci").iter().map(|s| s.parse().unwrap()).collect();
    let a = excess.iter().all(|e| *e <= 1e-9);

    let at = |p: &str| params.iter().position(|x| x == p);
    let b = match (at("7"), at("50")) {
        (Some(i7), Some(i50)) => gap[i50] + gap_ci[i50] < gap[i7] - gap_ci[i7],
        _ => false,
    };

    let (sh, srows) = read_csv(&dir.join("sweep.csv"));
    let verdicts = column(&sh, &srows, "verdict");
    let c = !verdicts.is_empty() && verdicts.iter().all(|v| v == Verdict::SingularIndicated.name());

    let detail = format!(
        "(a) {} max h_excess {:.3e}; (b) {} |l7-linf|={}, |l50-linf|={}; (c) {} verdicts [{}]",
        if a { "ok" } else { "fail" },
        excess.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        if b { "ok" } else { "fail" },
        at("7").map(|i| format!("{:.5}+-{:.5}", gap[i], gap_ci[i])).unwrap_or_default(),
        at("50").map(|i| format!("{:.5}+-{:.5}", gap[i], gap_ci[i])).unwrap_or_default(),
        if c { "ok" } else { "fail" },
        verdicts.join(" "),
    );
    outcome(a && b && c, detail)
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn plane<R: Rng>(rng: &mut R) -> HalfSpacePoint {
    HalfSpacePoint::Plane(c64(rng.random_range(-3.0..3.0), rng.random_range(0.1..5.0)))
}

fn space<R: Rng>(rng: &mut R) -> HalfSpacePoint {
    HalfSpacePoint::Space {
        z: c64(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)),
        t: rng.random_range(0.1..5.0),
    }
}

fn moebius<R: Rng>(rng: &mut R) -> MoebiusIsometry {
    loop {
        let v: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
        let (a, b, c, d) = (c64(v[0], v[1]), c64(v[2], v[3]), c64(v[4], v[5]), c64(v[6], v[7]));
        if (a * d - b * c).norm() > 0.2 {
            if let Ok(m) = MoebiusIsometry::new(MoebiusModel::Uhs3, a, b, c, d) {
                return m;
            }
        }
    }
}

fn sphere<R: Rng>(rng: &mut R) -> BoundaryPoint {
    let z: f64 = rng.random_range(-1.0..1.0);
    let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    BoundaryPoint::from_direction(&[r * t.cos(), r * t.sin(), z]).unwrap()
}

fn criterion_6() -> Outcome {
    let mut rng = trial_rng(SEED, 6);
    let mut failures: Vec<String> = Vec::new();
    let mut check = |name: &str, err: f64, tol: f64| {
        if !(err < tol) {
            failures.push(format!("{name}: {err:e} >= {tol:e}"));
        }
    };
    let cases = 100;

    let (mut model, mut iso_m, mut iso_l, mut cocycle, mut refl, mut rn) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..cases {
        let (p, q) = if k % 2 == 0 { (plane(&mut rng), plane(&mut rng)) } else { (space(&mut rng), space(&mut rng)) };
        let (x, y) = (halfspace_to_hyperboloid(&p).unwrap(), halfspace_to_hyperboloid(&q).unwrap());
        let d = dist_halfspace(&p, &q).unwrap();
        model = model.max((d - dist_hyperboloid(&x, &y).unwrap()).abs());

        let (p, q) = (space(&mut rng), space(&mut rng));
        let g = moebius(&mut rng);
        let before = dist_halfspace(&p, &q).unwrap();
        iso_m = iso_m.max((dist_halfspace(&g.apply(&p).unwrap(), &g.apply(&q).unwrap()).unwrap() - before).abs());
        let gl = Isometry::from(g).to_lorentz();
        let (x, y) = (halfspace_to_hyperboloid(&p).unwrap(), halfspace_to_hyperboloid(&q).unwrap());
        iso_l = iso_l.max((dist_hyperboloid(&gl.apply(&x).unwrap(), &gl.apply(&y).unwrap()).unwrap() - before).abs());

        let xi = sphere(&mut rng);
        let z = halfspace_to_hyperboloid(&space(&mut rng)).unwrap();
        let sum = busemann(&xi, &x, &y).unwrap() + busemann(&xi, &y, &z).unwrap();
        cocycle = cocycle.max((sum - busemann(&xi, &x, &z).unwrap()).abs());

        let v = LorentzVector::new(&[rng.random_range(-0.6..0.6), 1.0, rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
            .unwrap();
        let r = LorentzIsometry::reflection(&v).unwrap();
        let rr = r.compose(&r);
        let id = LorentzIsometry::identity(3).unwrap();
        refl = refl.max(rr.entries().zip(id.entries()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));

        let (g, h): (Isometry, Isometry) = (moebius(&mut rng).into(), moebius(&mut rng).into());
        let lhs = rn_weight(&g.compose(&h).unwrap(), &xi).unwrap();
        let rhs = rn_weight(&g, &xi).unwrap() * rn_weight(&h, &g.inverse().act_on_boundary(&xi).unwrap()).unwrap();
        rn = rn.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0));
    }
    check("model consistency", model, 1e-8);
    check("Moebius isometry", iso_m, 1e-8);
    check("Lorentz isometry", iso_l, 1e-8);
    check("Busemann cocycle", cocycle, 1e-7);
    check("reflection involution", refl, 1e-10);
    check("Radon-Nikodym cocycle", rn, 1e-6);

    // Quadrature of the Radon-Nikodym derivative over 10^4 equal-area points.
    let n = 10_000;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let circle: Vec<BoundaryPoint> = (0..n)
        .map(|k| {
            let t = (k as f64 + 0.5) * std::f64::consts::TAU / n as f64;
            BoundaryPoint::new(&[t.cos(), t.sin()]).unwrap()
        })
        .collect();
    let sphere_pts: Vec<BoundaryPoint> = (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * k as f64;
            BoundaryPoint::from_direction(&[r * t.cos(), r * t.sin(), z]).unwrap()
        })
        .collect();
    let mut mass = 0.0f64;
    for k in 0..20 {
        let g: Isometry = if k % 2 == 0 {
            let s: f64 = rng.random_range(-1.0..1.0);
            MoebiusIsometry::real(s.exp(), rng.random_range(-1.0..1.0), 0.0, (-s).exp()).unwrap().into()
        } else {
            let (a, b) = (rng.random_range(-1.0..1.0f64), rng.random_range(0.0..std::f64::consts::TAU));
            MoebiusIsometry::new(MoebiusModel::Uhs3, c64(a.exp(), 0.0), c64(b.cos(), b.sin()), c64(0.0, 0.0), c64((-a).exp(), 0.0))
                .unwrap()
                .into()
        };
        let pts = if g.dim() == 2 { &circle } else { &sphere_pts };
        let mean = pts.iter().map(|xi| rn_weight(&g, xi).unwrap()).sum::<f64>() / n as f64;
        mass = mass.max((mean - 1.0).abs());
    }
    check("mass conservation", mass, 1e-3);

    let pass = failures.is_empty();
    let detail = if pass {
        format!(
            "max errors: model {model:.1e}, isometry {:.1e}, Busemann {cocycle:.1e}, reflection {refl:.1e}, RN {rn:.1e}, mass {mass:.1e}",
            iso_m.max(iso_l)
        )
    } else {
        failures.join("; ")
    };
    outcome(pass, detail)
}

fn criterion_7(one: &Path, eight: &Path) -> Outcome {
    let a = std::fs::read(one.join("sweep.csv")).expect("sweep.csv at 1 thread");
    let b = std::fs::read(eight.join("sweep.csv")).expect("sweep.csv at 8 threads");
    outcome(a == b, format!("{} bytes at 1 thread, {} bytes at 8 threads, identical: {}", a.len(), b.len(), a == b))
}

fn report(n: usize, started: Instant, o: &Outcome) -> bool {
    println!(
        "criterion {n}: {} ({:.1}s) {}",
        if o.pass { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64(),
        o.detail
    );
    o.pass
}

fn main() {
    let tmp = tempfile::tempdir().expect("temp dir");
    let mut all = true;

    let t = Instant::now();
    all &= report(1, t, &criterion_1());
    let t = Instant::now();
    all &= report(2, t, &criterion_2());
    let t = Instant::now();
    all &= report(3, t, &criterion_3());
    let t = Instant::now();
    all &= report(4, t, &criterion_4());

    let t = Instant::now();
    let eight = tmp.path().join("threads8");
    let swept = run_sweep(&eight, 8);
    all &= report(
        5,
        t,
        &match &swept {
            Ok(()) => criterion_5(&eight),
            Err(e) => outcome(false, e.clone()),
        },
    );

    let t = Instant::now();
    all &= report(6, t, &criterion_6());

    let t = Instant::now();
    let one = tmp.path().join("threads1");
    all &= report(
        7,
        t,
        &match (swept, run_sweep(&one, 1)) {
            (Ok(()), Ok(())) => criterion_7(&one, &eight),
            (Err(e), _) | (_, Err(e)) => outcome(false, e),
        },
    );

    if !all {
        std::process::exit(1);
    }
}
