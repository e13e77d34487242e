use super::{EstimateKind, EstimateReport, EstimatorError};
use crate::groups::{ball, MarkedGroup};
use crate::tolerance::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentMode {
    /// `v = d - 1`; the caller vouches that the group is a lattice.
    LatticeExact,
    /// `max_R log N(R) / R` over orbit counts from a word ball.
    BallEstimate,
}

/// Critical exponent. In ball-estimate mode, for each word radius
/// `r <= r_max` the metric radius `R_r` is the largest displacement in the
/// word ball of radius `r`, `N(R_r)` counts elements of the radius-`r_max`
/// ball within `R_r`, and the report is the maximum of `log N(R_r) / R_r`.
/// It is non-decreasing in `r_max`.
pub fn critical_exponent(
    group: &MarkedGroup,
    mode: ExponentMode,
    r_max: usize,
    limits: &Limits,
) -> Result<EstimateReport, EstimatorError> {
    match mode {
        ExponentMode::LatticeExact => Ok(EstimateReport::exact((group.dim() - 1) as f64)),
        ExponentMode::BallEstimate => {
            let b = ball(group, r_max, limits)?;
            let mut best = 0.0f64;
            for r in 1..=r_max {
                let hi = b.count_within(r);
                let radius = b.displacements[..hi].iter().copied().fold(0.0, f64::max);
                if radius <= 0.0 {
                    continue;
                }
                let n = b.count_metric(radius);
                best = best.max((n as f64).ln() / radius);
            }
            Ok(EstimateReport {
                value: best,
                kind: EstimateKind::MonotoneBound,
                half_width: 0.0,
                upper_bound: None,
                samples_or_depth: r_max,
                seed: None,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    SingularIndicated,
    Inconclusive,
    ViolationSuspect,
    Degenerate,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::SingularIndicated => "singular-indicated",
            Verdict::Inconclusive => "inconclusive",
            Verdict::ViolationSuspect => "violation-suspect",
            Verdict::Degenerate => "degenerate",
        }
    }
}

/// `h / (ℓ v)` with a conservative bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostic {
    pub ratio: f64,
    pub lo: f64,
    pub hi: f64,
    pub verdict: Verdict,
}

/// Compares `h` with `ℓ·v`. The bracket widens `h` by its half-width and `ℓ`
/// by its half-width in the unfavourable direction; `v` is used as given.
pub fn fundamental_diagnostic(h: &EstimateReport, l: &EstimateReport, v: &EstimateReport) -> Diagnostic {
    let (uh, ul) = (h.half_width, l.half_width);
    if l.value <= ul || v.value <= 0.0 {
        return Diagnostic {
            ratio: f64::NAN,
            lo: f64::NAN,
            hi: f64::NAN,
            verdict: Verdict::Degenerate,
        };
    }
    let ratio = h.value / (l.value * v.value);
    let lo = (h.value - uh) / ((l.value + ul) * v.value);
    let hi = (h.value + uh) / ((l.value - ul) * v.value);
    let verdict = if hi < 1.0 {
        Verdict::SingularIndicated
    } else if lo > 1.0 + 1e-6 {
        Verdict::ViolationSuspect
    } else {
        Verdict::Inconclusive
    };
    Diagnostic { ratio, lo, hi, verdict }
}
