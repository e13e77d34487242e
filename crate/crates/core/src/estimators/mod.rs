//! Estimators for drift, asymptotic entropy and critical exponent, and the
//! diagnostic comparing `h` with `ℓ·v`.

mod entropy;
mod exponent;
mod sweep;
mod walk;

pub use entropy::{entropy_estimate, entropy_upper_sequence, EntropyRow, EntropyTable};
pub use exponent::{critical_exponent, fundamental_diagnostic, Diagnostic, ExponentMode, Verdict};
pub use sweep::{family_sweep, GroupFamily, SweepConfig, SweepRow, SweepTable, TrendRow, SWEEP_COLUMNS};
pub use walk::{drift_mc, sample_walk, trial_rng, DriftConfig, DriftResult, Sampler, WalkSample, Walker};

use thiserror::Error;

use crate::groups::GroupError;
use crate::measures::MeasureError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("measure and group live in different models")]
    ModelMismatch,
    #[error("matrix entries overflowed at step {step}")]
    Overflow { step: usize },
    #[error("trial {trial}: matrix entries overflowed at step {step}")]
    TrialOverflow { trial: usize, step: usize },
    #[error("convolution power {power} failed after {completed} completed powers: {source}")]
    ConvolutionOverflow {
        power: usize,
        completed: usize,
        partial: Box<EntropyTable>,
        source: MeasureError,
    },
    #[error("invalid estimator configuration: {0}")]
    Config(String),
}

impl EstimatorError {
    /// Whether the failure is a resource cap rather than bad input.
    pub fn is_cap_breach(&self) -> bool {
        matches!(
            self,
            EstimatorError::ConvolutionOverflow { .. }
                | EstimatorError::Measure(MeasureError::SupportOverflow { .. })
                | EstimatorError::Group(GroupError::CapExceeded { .. })
                | EstimatorError::Measure(MeasureError::Group(GroupError::CapExceeded { .. }))
        )
    }

    pub fn is_audit_failure(&self) -> bool {
        matches!(
            self,
            EstimatorError::Group(GroupError::Collision { .. })
                | EstimatorError::Measure(MeasureError::Group(GroupError::Collision { .. }))
                | EstimatorError::Overflow { .. }
                | EstimatorError::TrialOverflow { .. }
        )
    }
}

/// How an estimate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    MonteCarlo,
    MonotoneBound,
    Exact,
}

impl EstimateKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimateKind::MonteCarlo => "monte-carlo",
            EstimateKind::MonotoneBound => "monotone-bound",
            EstimateKind::Exact => "exact",
        }
    }
}

/// A numeric estimate with its uncertainty.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub value: f64,
    pub kind: EstimateKind,
    /// 95% half-width for Monte Carlo, bias bound for monotone bounds, 0 for
    /// exact values.
    pub half_width: f64,
    /// Certified upper bound, where one exists.
    pub upper_bound: Option<f64>,
    pub samples_or_depth: usize,
    pub seed: Option<u64>,
}

impl EstimateReport {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            kind: EstimateKind::Exact,
            half_width: 0.0,
            upper_bound: None,
            samples_or_depth: 0,
            seed: None,
        }
    }
}
