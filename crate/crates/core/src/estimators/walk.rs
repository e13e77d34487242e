use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{EstimateKind, EstimateReport, EstimatorError};
use crate::groups::{GroupElement, MarkedGroup};
use crate::hypgeom::{BallPoint, Isometry, LorentzIsometry, MoebiusIsometry};
use crate::measures::FinSuppMeasure;

const RENORM_EVERY: usize = 32;
const RESCALE_ABOVE: f64 = 1e64;
const REORTHO_BELOW: f64 = 1e8;

/// RNG for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(trial);
    r
}

#[derive(Debug, Clone, Copy)]
enum State {
    Moebius { model: crate::hypgeom::MoebiusModel, m: [Complex64; 4] },
    Lorentz { dim: usize, m: Matrix4<f64> },
}

/// Running product `ω_n = g_1 ⋯ g_n`, stored as `e^s · M` so that long walks
/// never overflow.
#[derive(Debug, Clone)]
pub struct Walker {
    state: State,
    log_scale: f64,
    steps: usize,
}

fn lorentz_gram_schmidt(m: &mut Matrix4<f64>, dim: usize) {
    let n = dim + 1;
    let prod = |m: &Matrix4<f64>, a: usize, b: usize| -> f64 {
        -m[(0, a)] * m[(0, b)] + (1..n).map(|i| m[(i, a)] * m[(i, b)]).sum::<f64>()
    };
    for j in 0..n {
        for k in 0..j {
            let sign = if k == 0 { -1.0 } else { 1.0 };
            let c = prod(m, j, k) * sign;
            for i in 0..n {
                m[(i, j)] -= c * m[(i, k)];
            }
        }
        let nn = prod(m, j, j).abs().sqrt();
        for i in 0..n {
            m[(i, j)] /= nn;
        }
    }
}

impl Walker {
    pub fn new(start: &Isometry) -> Self {
        let state = match start {
            Isometry::Moebius(g) => State::Moebius {
                model: g.model(),
                m: *g.entries(),
            },
            Isometry::Lorentz(l) => State::Lorentz {
                dim: l.dim(),
                m: *l.matrix(),
            },
        };
        Self {
            state,
            log_scale: 0.0,
            steps: 0,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Right-multiplies by `g`.
    pub fn step(&mut self, g: &Isometry) -> Result<(), EstimatorError> {
        match (&mut self.state, g) {
            (State::Moebius { m, .. }, Isometry::Moebius(h)) => {
                let [a, b, c, d] = *m;
                let [e, f, gg, hh] = *h.entries();
                *m = [a * e + b * gg, a * f + b * hh, c * e + d * gg, c * f + d * hh];
            }
            (State::Lorentz { m, .. }, Isometry::Lorentz(h)) => {
                *m *= h.matrix();
            }
            _ => return Err(EstimatorError::ModelMismatch),
        }
        self.steps += 1;
        if self.steps % RENORM_EVERY == 0 {
            self.renormalize()?;
        }
        Ok(())
    }

    fn max_entry(&self) -> f64 {
        match &self.state {
            State::Moebius { m, .. } => m.iter().map(|z| z.norm()).fold(0.0, f64::max),
            State::Lorentz { m, .. } => m.amax(),
        }
    }

    fn renormalize(&mut self) -> Result<(), EstimatorError> {
        let mx = self.max_entry();
        if !mx.is_finite() {
            return Err(EstimatorError::Overflow { step: self.steps });
        }
        if self.log_scale == 0.0 && mx < REORTHO_BELOW {
            match &mut self.state {
                State::Moebius { m, .. } => {
                    let det = m[0] * m[3] - m[1] * m[2];
                    let s = det.sqrt();
                    m.iter_mut().for_each(|z| *z /= s);
                }
                State::Lorentz { dim, m } => lorentz_gram_schmidt(m, *dim),
            }
        } else if mx > RESCALE_ABOVE {
            match &mut self.state {
                State::Moebius { m, .. } => m.iter_mut().for_each(|z| *z /= mx),
                State::Lorentz { m, .. } => *m /= mx,
            }
            self.log_scale += mx.ln();
        }
        Ok(())
    }

    /// `log cosh d(o, ω_n o)`.
    fn log_cosh(&self) -> f64 {
        match &self.state {
            State::Moebius { m, .. } => {
                2.0 * self.log_scale + (m.iter().map(|z| z.norm_sqr()).sum::<f64>() / 2.0).ln()
            }
            State::Lorentz { m, .. } => self.log_scale + m[(0, 0)].ln(),
        }
    }

    /// `d(o, ω_n o)`, from `arccosh(y) = log y + log(1 + sqrt(1 - y^{-2}))`.
    pub fn displacement(&self) -> f64 {
        let l = self.log_cosh().max(0.0);
        l + (1.0 + (1.0 - (-2.0 * l).exp()).max(0.0).sqrt()).ln()
    }

    /// Orbit point `ω_n o` on the hyperboloid, in the form
    /// `(x_0, ..., x_d)` divided by the common factor `e^{k s}`.
    fn orbit_scaled(&self) -> (usize, [f64; 4], f64) {
        match &self.state {
            State::Lorentz { dim, m } => {
                let mut c = [0.0; 4];
                for (i, ci) in c.iter_mut().enumerate().take(dim + 1) {
                    *ci = m[(i, 0)];
                }
                (*dim, c, self.log_scale)
            }
            State::Moebius { model, m } => {
                // H(ω o) = g g*; read off the Minkowski coordinates.
                let [a, b, c, d] = *m;
                let h00 = a.norm_sqr() + b.norm_sqr();
                let h11 = c.norm_sqr() + d.norm_sqr();
                let h01 = a * c.conj() + b * d.conj();
                let x0 = (h00 + h11) / 2.0;
                let x3 = (h00 - h11) / 2.0;
                match model {
                    crate::hypgeom::MoebiusModel::Uhp2 => (2, [x0, h01.re, x3, 0.0], 2.0 * self.log_scale),
                    crate::hypgeom::MoebiusModel::Uhs3 => (3, [x0, h01.re, h01.im, x3], 2.0 * self.log_scale),
                }
            }
        }
    }

    /// Ball-model image of `ω_n o`.
    pub fn ball_point(&self) -> BallPoint {
        let (dim, c, s) = self.orbit_scaled();
        let f = (-s).exp();
        let den = f + c[0];
        let mut v = [0.0; 4];
        for k in 1..=dim {
            v[k] = c[k] / den;
        }
        BallPoint::from_coords(&v[1..=dim])
    }

    /// Current product as an isometry, if it was never rescaled.
    pub fn isometry(&self) -> Option<Isometry> {
        if self.log_scale != 0.0 {
            return None;
        }
        Some(match &self.state {
            State::Moebius { model, m } => {
                MoebiusIsometry::new(*model, m[0], m[1], m[2], m[3]).ok()?.into()
            }
            State::Lorentz { dim, m } => {
                let n = dim + 1;
                let mut rows = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        rows[i * n + j] = m[(i, j)];
                    }
                }
                LorentzIsometry::new_unchecked(*dim, &rows).ok()?.into()
            }
        })
    }
}

/// Draws generator indices from a measure by inverse CDF.
#[derive(Debug, Clone)]
pub struct Sampler {
    cdf: Vec<f64>,
    atoms: Vec<Isometry>,
}

impl Sampler {
    pub fn new(mu: &FinSuppMeasure) -> Self {
        Self {
            cdf: mu.cumulative(),
            atoms: mu.atoms().map(|(e, _)| *e.isometry()).collect(),
        }
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> &Isometry {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u);
        &self.atoms[i.min(self.atoms.len() - 1)]
    }

    pub fn atoms(&self) -> &[Isometry] {
        &self.atoms
    }
}

/// One sampled trajectory.
#[derive(Debug, Clone)]
pub struct WalkSample {
    pub steps: usize,
    /// `ω_n`, when its entries stayed representable without rescaling.
    pub terminal: Option<GroupElement>,
    pub displacement: f64,
    /// Ball-model orbit points `ω_k o`, `k = 1..n`, when requested.
    pub trajectory: Vec<BallPoint>,
}

pub fn sample_walk(
    group: &MarkedGroup,
    mu: &FinSuppMeasure,
    steps: usize,
    seed: u64,
    trial: u64,
    keep_trajectory: bool,
) -> Result<WalkSample, EstimatorError> {
    if steps == 0 {
        return Err(EstimatorError::Config("a walk needs at least one step".into()));
    }
    let sampler = Sampler::new(mu);
    let mut rng = trial_rng(seed, trial);
    let mut w = Walker::new(group.identity().isometry());
    let mut traj = Vec::new();
    for _ in 0..steps {
        w.step(sampler.draw(&mut rng))?;
        if keep_trajectory {
            traj.push(w.ball_point());
        }
    }
    Ok(WalkSample {
        steps,
        terminal: w.isometry().map(|g| GroupElement::new(g, None)),
        displacement: w.displacement(),
        trajectory: traj,
    })
}

/// Parameters of [`drift_mc`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DriftConfig {
    pub steps: usize,
    pub trials: usize,
    pub seed: u64,
    /// Record the mean displacement every this many steps (0: never).
    pub trace_every: usize,
}

impl Default for DriftConfig {
    fn default() -> Self {
        Self {
            steps: 2000,
            trials: 4000,
            seed: 1,
            trace_every: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DriftResult {
    pub report: EstimateReport,
    /// `(step, mean displacement over trials)`.
    pub trace: Vec<(usize, f64)>,
}

/// Monte Carlo drift: mean of `d(o, ω_n o) / n` over independent trials with
/// a 95% normal half-width. Trials run in parallel; the reduction is in trial
/// order, so results do not depend on the thread count.
pub fn drift_mc(
    group: &MarkedGroup,
    mu: &FinSuppMeasure,
    cfg: &DriftConfig,
) -> Result<DriftResult, EstimatorError> {
    if cfg.steps == 0 || cfg.trials < 2 {
        return Err(EstimatorError::Config(format!(
            "drift needs steps >= 1 and trials >= 2 (got {} and {})",
            cfg.steps, cfg.trials
        )));
    }
    if mu.tag() != group.tag() {
        return Err(EstimatorError::ModelMismatch);
    }
    let sampler = Sampler::new(mu);
    let id = *group.identity().isometry();
    let checkpoints: Vec<usize> = if cfg.trace_every > 0 {
        (1..=cfg.steps).filter(|k| k % cfg.trace_every == 0).collect()
    } else {
        Vec::new()
    };
    let per_trial: Vec<Result<(f64, Vec<f64>), EstimatorError>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t as u64);
            let mut w = Walker::new(&id);
            let mut tr = Vec::with_capacity(checkpoints.len());
            let mut next = 0;
            for k in 1..=cfg.steps {
                w.step(sampler.draw(&mut rng)).map_err(|e| match e {
                    EstimatorError::Overflow { step } => EstimatorError::TrialOverflow { trial: t, step },
                    other => other,
                })?;
                if next < checkpoints.len() && checkpoints[next] == k {
                    tr.push(w.displacement());
                    next += 1;
                }
            }
            Ok((w.displacement() / cfg.steps as f64, tr))
        })
        .collect();
    let mut xs = Vec::with_capacity(cfg.trials);
    let mut trace_sum = vec![0.0; checkpoints.len()];
    for r in per_trial {
        let (x, tr) = r?;
        xs.push(x);
        for (s, v) in trace_sum.iter_mut().zip(tr) {
            *s += v;
        }
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let hw = 1.96 * (var / n).sqrt();
    let trace = checkpoints
        .iter()
        .zip(trace_sum)
        .map(|(&k, s)| (k, s / n))
        .collect();
    Ok(DriftResult {
        report: EstimateReport {
            value: mean,
            kind: EstimateKind::MonteCarlo,
            half_width: hw,
            upper_bound: None,
            samples_or_depth: cfg.trials,
            seed: Some(cfg.seed),
        },
        trace,
    })
}
