use super::{EstimateKind, EstimateReport, EstimatorError};
use crate::measures::{convolve, entropy, ConvolveOptions, FinSuppMeasure};
use crate::tolerance::Limits;

/// One convolution power.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyRow {
    pub n: usize,
    /// `H(μ^{*n})`.
    pub h: f64,
    /// `H(μ^{*n}) / n`, non-increasing in `n`.
    pub h_over_n: f64,
    /// `H(μ^{*n}) - H(μ^{*(n-1)})`.
    pub delta: f64,
    pub atoms: usize,
    /// Total mass pruned up to this power.
    pub dropped: f64,
    /// Entropy error bound from pruning, `dropped · log(1/floor)`.
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EntropyTable {
    pub rows: Vec<EntropyRow>,
}

impl EntropyTable {
    pub fn last(&self) -> Option<&EntropyRow> {
        self.rows.last()
    }
}

/// Exact entropies of `μ^{*n}` for `n = 1..=n_max`. Each power is built as
/// `μ^{*(n-1)} * μ`, which equals `μ * μ^{*(n-1)}` and puts the large factor
/// on the parallelized side.
pub fn entropy_upper_sequence(
    mu: &FinSuppMeasure,
    n_max: usize,
    opts: &ConvolveOptions,
    limits: &Limits,
) -> Result<EntropyTable, EstimatorError> {
    if n_max > limits.convolution_depth {
        return Err(EstimatorError::Config(format!(
            "depth {n_max} exceeds the convolution cap {}",
            limits.convolution_depth
        )));
    }
    let log_floor = if opts.prune_floor > 0.0 { -opts.prune_floor.ln() } else { 0.0 };
    let mut table = EntropyTable::default();
    let mut power = mu.clone();
    let mut prev = 0.0;
    for n in 1..=n_max {
        if n > 1 {
            power = match convolve(&power, mu, opts) {
                Ok(p) => p,
                Err(source) => {
                    return Err(EstimatorError::ConvolutionOverflow {
                        power: n,
                        completed: n - 1,
                        partial: Box::new(table),
                        source,
                    })
                }
            };
        }
        let h = entropy(&power);
        table.rows.push(EntropyRow {
            n,
            h,
            h_over_n: h / n as f64,
            delta: h - prev,
            atoms: power.len(),
            dropped: power.dropped_mass(),
            bias: power.dropped_mass() * log_floor,
        });
        prev = h;
    }
    Ok(table)
}

/// Estimate of record: the last increment `ΔH_{n_max}`, with
/// `H(μ^{*n_max}) / n_max` as certified upper bound and the pruning bias as
/// half-width.
pub fn entropy_estimate(table: &EntropyTable) -> Option<EstimateReport> {
    let last = table.rows.last()?;
    let prev_bias = table
        .rows
        .len()
        .checked_sub(2)
        .map_or(0.0, |i| table.rows[i].bias);
    Some(EstimateReport {
        value: last.delta,
        kind: EstimateKind::MonotoneBound,
        half_width: last.bias + prev_bias,
        upper_bound: Some(last.h_over_n + last.bias / last.n as f64),
        samples_or_depth: last.n,
        seed: None,
    })
}
