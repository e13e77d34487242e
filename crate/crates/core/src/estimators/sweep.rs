use rayon::prelude::*;

use super::{
    critical_exponent, drift_mc, entropy_estimate, entropy_upper_sequence, fundamental_diagnostic, Diagnostic,
    DriftConfig, EntropyTable, EstimateKind, EstimatorError, ExponentMode,
};
use crate::groups::{Label, MarkedGroup};
use crate::measures::{ConvolveOptions, FinSuppMeasure};
use crate::tolerance::Limits;

/// Column order of serialized sweep rows.
pub const SWEEP_COLUMNS: [&str; 12] = [
    "family_param",
    "h_upper",
    "h_delta",
    "h_depth",
    "drift",
    "drift_ci",
    "v",
    "v_kind",
    "ratio_lo",
    "ratio_hi",
    "verdict",
    "seed",
];

/// A one-parameter family of groups with measures, indexed by a label.
pub trait GroupFamily: Sync {
    /// Parameter values, with `Label::Infinity` (the limit) last if present.
    fn params(&self) -> Vec<Label>;
    fn instantiate_member(&self, n: Label) -> Result<(MarkedGroup, FinSuppMeasure), EstimatorError>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Convolution depth of the entropy sequence.
    pub depth: usize,
    pub drift: DriftConfig,
    pub convolve: ConvolveOptions,
    pub v_mode: ExponentMode,
    /// Word radius for ball-estimate mode.
    pub ball_radius: usize,
    pub limits: Limits,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            depth: 8,
            drift: DriftConfig::default(),
            convolve: ConvolveOptions::default(),
            v_mode: ExponentMode::LatticeExact,
            ball_radius: 8,
            limits: Limits::DEFAULT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: Label,
    /// `H(μ^{*k}) / k` at the deepest completed level.
    pub h_upper: f64,
    /// Last increment, the entropy estimate of record.
    pub h_delta: f64,
    pub h_depth: usize,
    /// `H(μ^{*k})` for `k = 1..=h_depth`.
    pub h_sequence: Vec<f64>,
    pub drift: f64,
    pub drift_ci: f64,
    pub v: f64,
    pub v_kind: EstimateKind,
    pub diagnostic: Option<Diagnostic>,
    pub seed: u64,
    /// First estimator failure for this member; the other fields hold
    /// whatever was computed before it (NaN otherwise).
    pub error: Option<String>,
}

impl SweepRow {
    fn empty(param: Label, seed: u64) -> Self {
        Self {
            param,
            h_upper: f64::NAN,
            h_delta: f64::NAN,
            h_depth: 0,
            h_sequence: Vec::new(),
            drift: f64::NAN,
            drift_ci: f64::NAN,
            v: f64::NAN,
            v_kind: EstimateKind::Exact,
            diagnostic: None,
            seed,
            error: None,
        }
    }
}

/// Comparison of one member against the limit row.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendRow {
    pub param: Label,
    /// `max_k H_k(member) - H_k(limit)` over common depths; should be `<= 0`.
    pub h_excess: f64,
    pub common_depth: usize,
    /// `|ℓ_n - ℓ_∞|`.
    pub drift_gap: f64,
    /// Sum of the two drift half-widths.
    pub drift_gap_ci: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn limit_row(&self) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.param == Label::Infinity)
    }

    /// Trend of every finite member against the limit row. Empty when the
    /// family has no limit.
    pub fn trend(&self) -> Vec<TrendRow> {
        let Some(lim) = self.limit_row() else {
            return Vec::new();
        };
        self.rows
            .iter()
            .filter(|r| r.param != Label::Infinity)
            .map(|r| {
                let common = r.h_sequence.len().min(lim.h_sequence.len());
                let h_excess = (0..common)
                    .map(|k| r.h_sequence[k] - lim.h_sequence[k])
                    .fold(f64::NEG_INFINITY, f64::max);
                TrendRow {
                    param: r.param,
                    h_excess,
                    common_depth: common,
                    drift_gap: (r.drift - lim.drift).abs(),
                    drift_gap_ci: r.drift_ci + lim.drift_ci,
                }
            })
            .collect()
    }
}

fn run_member(family: &dyn GroupFamily, n: Label, cfg: &SweepConfig) -> SweepRow {
    let mut row = SweepRow::empty(n, cfg.drift.seed);
    let (group, mu) = match family.instantiate_member(n) {
        Ok(x) => x,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };

    let table = match entropy_upper_sequence(&mu, cfg.depth, &cfg.convolve, &cfg.limits) {
        Ok(t) => t,
        Err(EstimatorError::ConvolutionOverflow { partial, power, .. }) => {
            row.error = Some(format!("convolution cap reached at power {power}"));
            *partial
        }
        Err(e) => {
            row.error = Some(e.to_string());
            EntropyTable::default()
        }
    };
    let h = entropy_estimate(&table);
    if let Some(h) = &h {
        row.h_upper = h.upper_bound.unwrap_or(f64::NAN);
        row.h_delta = h.value;
        row.h_depth = h.samples_or_depth;
        row.h_sequence = table.rows.iter().map(|r| r.h).collect();
    }

    let l = match drift_mc(&group, &mu, &cfg.drift) {
        Ok(r) => Some(r.report),
        Err(e) => {
            row.error.get_or_insert(e.to_string());
            None
        }
    };
    if let Some(l) = &l {
        row.drift = l.value;
        row.drift_ci = l.half_width;
    }

    let v = match critical_exponent(&group, cfg.v_mode, cfg.ball_radius, &cfg.limits) {
        Ok(v) => Some(v),
        Err(e) => {
            row.error.get_or_insert(e.to_string());
            None
        }
    };
    if let Some(v) = &v {
        row.v = v.value;
        row.v_kind = v.kind;
    }

    if let (Some(h), Some(l), Some(v)) = (h, l, v) {
        row.diagnostic = Some(fundamental_diagnostic(&h, &l, &v));
    }
    row
}

/// Runs every family member through entropy, drift and exponent estimation
/// and the diagnostic. All members share the drift seed. Failures are
/// recorded per row and never abort the sweep.
pub fn family_sweep(family: &dyn GroupFamily, cfg: &SweepConfig) -> SweepTable {
    let rows = family
        .params()
        .into_par_iter()
        .map(|n| run_member(family, n, cfg))
        .collect();
    SweepTable { rows }
}
