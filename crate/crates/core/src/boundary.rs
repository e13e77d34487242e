//! Hitting measures on `S^1` / `S^2` and the Radon–Nikodym weight of the
//! Lebesgue class.
//!
//! The uniformity statistics here are indicators only: a singular measure
//! can look flat at any finite resolution.

use rand::Rng;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

use crate::estimators::{trial_rng, EstimatorError, Sampler, Walker};
use crate::groups::MarkedGroup;
use crate::hypgeom::{boundary_project, busemann, BoundaryModel, BoundaryPoint, GeomError, Isometry, LorentzVector};
use crate::measures::FinSuppMeasure;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundaryError {
    #[error("walk did not reach the escape radius within {steps} steps")]
    NonEscaping { steps: usize },
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("measure and group live in different models")]
    ModelMismatch,
    #[error("binning is for {binning:?} but points live on {points:?}")]
    BinningMismatch { binning: BoundaryModel, points: BoundaryModel },
    #[error("invalid hitting configuration: {0}")]
    Config(String),
}

/// Stopping rule for [`sample_limit_point`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeConfig {
    /// Ball-model norm at which the orbit point counts as escaped.
    pub escape_radius: f64,
    pub max_steps: usize,
}

impl Default for EscapeConfig {
    fn default() -> Self {
        Self {
            escape_radius: 1.0 - 1e-6,
            max_steps: 100_000,
        }
    }
}

impl EscapeConfig {
    fn validate(&self) -> Result<(), BoundaryError> {
        if self.escape_radius > 0.0 && self.escape_radius < 1.0 {
            Ok(())
        } else {
            Err(BoundaryError::Config(format!(
                "escape radius {} must lie in (0, 1)",
                self.escape_radius
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitSample {
    pub point: BoundaryPoint,
    pub steps: usize,
}

/// Runs the walk until `ω_n o` leaves the ball of radius `escape_radius` and
/// projects that orbit point radially to the boundary.
pub fn sample_limit_point<R: Rng>(
    group: &MarkedGroup,
    mu: &FinSuppMeasure,
    cfg: &EscapeConfig,
    rng: &mut R,
) -> Result<LimitSample, BoundaryError> {
    if mu.tag() != group.tag() {
        return Err(BoundaryError::ModelMismatch);
    }
    cfg.validate()?;
    let sampler = Sampler::new(mu);
    walk_to_boundary(&sampler, group.identity().isometry(), cfg, rng)
}

fn walk_to_boundary<R: Rng>(
    sampler: &Sampler,
    start: &Isometry,
    cfg: &EscapeConfig,
    rng: &mut R,
) -> Result<LimitSample, BoundaryError> {
    let mut w = Walker::new(start);
    for k in 1..=cfg.max_steps {
        w.step(sampler.draw(rng))?;
        let p = w.ball_point();
        if p.norm() >= cfg.escape_radius {
            return Ok(LimitSample {
                point: boundary_project(&p)?,
                steps: k,
            });
        }
    }
    Err(BoundaryError::NonEscaping { steps: cfg.max_steps })
}

/// Equal-measure partition of the boundary sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binning {
    /// Arcs of equal angle, starting at angle `-π`.
    Circle { arcs: usize },
    /// Equal-area cells: `bands` slabs of equal height in `z` times
    /// `longitudes` equal sectors.
    Sphere { bands: usize, longitudes: usize },
}

impl Binning {
    pub fn default_for(model: BoundaryModel) -> Self {
        match model {
            BoundaryModel::Circle => Binning::Circle { arcs: 64 },
            BoundaryModel::Sphere => Binning::Sphere { bands: 8, longitudes: 8 },
        }
    }

    pub fn model(&self) -> BoundaryModel {
        match self {
            Binning::Circle { .. } => BoundaryModel::Circle,
            Binning::Sphere { .. } => BoundaryModel::Sphere,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Binning::Circle { arcs } => arcs,
            Binning::Sphere { bands, longitudes } => bands * longitudes,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn sector(angle: f64, n: usize) -> usize {
        (((angle + PI) / (2.0 * PI) * n as f64).floor() as usize).min(n - 1)
    }

    pub fn bin_of(&self, xi: &BoundaryPoint) -> Result<usize, BoundaryError> {
        if xi.model() != self.model() {
            return Err(BoundaryError::BinningMismatch {
                binning: self.model(),
                points: xi.model(),
            });
        }
        let v = xi.value();
        Ok(match *self {
            Binning::Circle { arcs } => Self::sector(v[1].atan2(v[0]), arcs),
            Binning::Sphere { bands, longitudes } => {
                let band = (((v[2] + 1.0) / 2.0 * bands as f64).floor() as usize).min(bands - 1);
                band * longitudes + Self::sector(v[1].atan2(v[0]), longitudes)
            }
        })
    }

    /// Center of bin `i` on the unit sphere (midpoint in angle and `z`).
    pub fn bin_center(&self, i: usize) -> Vec<f64> {
        let mid = |k: usize, n: usize| -PI + (k as f64 + 0.5) * 2.0 * PI / n as f64;
        match *self {
            Binning::Circle { arcs } => {
                let t = mid(i, arcs);
                vec![t.cos(), t.sin()]
            }
            Binning::Sphere { bands, longitudes } => {
                let z = -1.0 + (i / longitudes) as f64 * 2.0 / bands as f64 + 1.0 / bands as f64;
                let t = mid(i % longitudes, longitudes);
                let r = (1.0 - z * z).sqrt();
                vec![r * t.cos(), r * t.sin(), z]
            }
        }
    }
}

/// Empirical proxy for the hitting measure.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryHistogram {
    pub binning: Binning,
    pub counts: Vec<u64>,
    /// Escaped samples, equal to the sum of `counts`.
    pub total: u64,
    pub non_escaping: u64,
    /// Set when more than 1% of the trials did not escape.
    pub warning: bool,
}

impl BoundaryHistogram {
    pub fn empty(binning: Binning) -> Self {
        Self {
            binning,
            counts: vec![0; binning.len()],
            total: 0,
            non_escaping: 0,
            warning: false,
        }
    }

    pub fn from_points(binning: Binning, points: &[BoundaryPoint]) -> Result<Self, BoundaryError> {
        let mut h = Self::empty(binning);
        for p in points {
            h.counts[binning.bin_of(p)?] += 1;
        }
        h.total = points.len() as u64;
        Ok(h)
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

/// Escaped limit points of independent walks, in trial order.
#[derive(Debug, Clone, PartialEq)]
pub struct HittingSamples {
    pub points: Vec<BoundaryPoint>,
    pub steps: Vec<usize>,
    pub non_escaping: u64,
    pub trials: usize,
}

/// Samples `trials` limit points with the per-trial RNG streams of
/// [`trial_rng`]. Non-escaping trials are counted, not fatal.
pub fn hitting_samples(
    group: &MarkedGroup,
    mu: &FinSuppMeasure,
    trials: usize,
    seed: u64,
    cfg: &EscapeConfig,
) -> Result<HittingSamples, BoundaryError> {
    if mu.tag() != group.tag() {
        return Err(BoundaryError::ModelMismatch);
    }
    cfg.validate()?;
    let sampler = Sampler::new(mu);
    let id = *group.identity().isometry();
    let results: Vec<Result<LimitSample, BoundaryError>> = (0..trials)
        .into_par_iter()
        .map(|t| walk_to_boundary(&sampler, &id, cfg, &mut trial_rng(seed, t as u64)))
        .collect();
    let mut out = HittingSamples {
        points: Vec::with_capacity(trials),
        steps: Vec::with_capacity(trials),
        non_escaping: 0,
        trials,
    };
    for r in results {
        match r {
            Ok(s) => {
                out.points.push(s.point);
                out.steps.push(s.steps);
            }
            Err(BoundaryError::NonEscaping { .. }) => out.non_escaping += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

pub fn empirical_hitting(
    group: &MarkedGroup,
    mu: &FinSuppMeasure,
    trials: usize,
    binning: Binning,
    seed: u64,
    cfg: &EscapeConfig,
) -> Result<BoundaryHistogram, BoundaryError> {
    if binning.model() != BoundaryModel::for_dim(group.dim())? {
        return Err(BoundaryError::BinningMismatch {
            binning: binning.model(),
            points: BoundaryModel::for_dim(group.dim())?,
        });
    }
    let s = hitting_samples(group, mu, trials, seed, cfg)?;
    let mut h = BoundaryHistogram::from_points(binning, &s.points)?;
    h.non_escaping = s.non_escaping;
    h.warning = s.non_escaping as f64 > 0.01 * trials as f64;
    Ok(h)
}

/// Divergence of a histogram from the uniform measure. Indicator only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformityStats {
    /// Total variation distance between binned frequencies and uniform.
    pub tv: f64,
    pub chi2: f64,
    /// Largest count over the uniform expected count.
    pub max_ratio: f64,
    pub bins: usize,
    pub total: u64,
    /// Fewer than `100 · bins` samples.
    pub undersampled: bool,
}

impl UniformityStats {
    pub const LABEL: &'static str = "indicator only";
}

pub fn uniformity_stats(hist: &BoundaryHistogram) -> UniformityStats {
    let b = hist.counts.len();
    let n = hist.total as f64;
    let undersampled = hist.total < 100 * b as u64;
    if hist.total == 0 || b == 0 {
        return UniformityStats {
            tv: f64::NAN,
            chi2: f64::NAN,
            max_ratio: f64::NAN,
            bins: b,
            total: hist.total,
            undersampled,
        };
    }
    let share = 1.0 / b as f64;
    let expected = n * share;
    let mut tv = 0.0;
    let mut chi2 = 0.0;
    let mut max = 0u64;
    for &c in &hist.counts {
        tv += (c as f64 / n - share).abs();
        chi2 += (c as f64 - expected).powi(2) / expected;
        max = max.max(c);
    }
    UniformityStats {
        tv: tv / 2.0,
        chi2,
        max_ratio: max as f64 / expected,
        bins: b,
        total: hist.total,
        undersampled,
    }
}

/// Density of `g_* λ` against the rotation-invariant probability `λ` on the
/// boundary sphere, `exp(-(d-1) β_ξ(g o, o))`. Satisfies
/// `rn_weight(gh, ξ) = rn_weight(g, ξ) · rn_weight(h, g⁻¹ξ)`.
pub fn rn_weight(g: &Isometry, xi: &BoundaryPoint) -> Result<f64, BoundaryError> {
    let d = g.dim();
    if xi.model().dim() != d {
        return Err(GeomError::DimensionMismatch {
            left: d,
            right: xi.model().dim(),
        }
        .into());
    }
    let o = LorentzVector::basepoint(d)?;
    let beta = busemann(xi, &g.orbit_point(), &o)?;
    Ok((-((d - 1) as f64) * beta).exp())
}

/// Finite-sample check of `ν = μ * ν`: the TV distance between the binned
/// samples and the binned mixture `Σ μ(g) g_*(samples)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityReport {
    pub tv: f64,
    /// `5 · sqrt(bins / total)`.
    pub threshold: f64,
}

impl StationarityReport {
    pub fn passes(&self) -> bool {
        self.tv < self.threshold
    }
}

pub fn stationarity_indicator(
    samples: &[BoundaryPoint],
    mu: &FinSuppMeasure,
    binning: Binning,
) -> Result<StationarityReport, BoundaryError> {
    let base = BoundaryHistogram::from_points(binning, samples)?.frequencies();
    let mut pushed = vec![0.0; binning.len()];
    let n = samples.len().max(1) as f64;
    for (e, m) in mu.atoms() {
        for p in samples {
            let q = e.isometry().act_on_boundary(p)?;
            pushed[binning.bin_of(&q)?] += m / n;
        }
    }
    let tv = base.iter().zip(&pushed).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
    Ok(StationarityReport {
        tv,
        threshold: 5.0 * (binning.len() as f64 / n).sqrt(),
    })
}
