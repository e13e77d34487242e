//! Numerical tolerances and resource caps shared by every module.
//!
//! Floating-point drift is the main hazard in this crate: group elements are
//! identified by quantized matrix entries, so every threshold that decides
//! "same element", "valid point" or "negligible mass" lives here.

/// Tolerance record. `Tolerances::DEFAULT` holds the documented defaults;
/// the CLI may override individual fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// `<x,x> = -1` and `x_0 > 0` for hyperboloid points.
    pub hyperboloid: f64,
    /// `-<x,y>` may undershoot 1 by this much before a pair is rejected.
    pub distance_pair: f64,
    /// Determinant of a normalized Möbius matrix.
    pub determinant: f64,
    /// `M^T J M = J` for Lorentz matrices.
    pub lorentz_form: f64,
    /// Euclidean norm of a boundary point.
    pub boundary_norm: f64,
    /// Entries below this magnitude are skipped by the PSL sign rule.
    pub psl_sign: f64,
    /// Quantization step of canonical keys.
    pub key_grid: f64,
    /// Entries this close to a cell boundary are also looked up in the
    /// neighbouring cell.
    pub key_probe: f64,
    /// Two elements sharing a key must agree entrywise within this bound.
    pub key_audit: f64,
    /// Atoms lighter than this are dropped from convolution powers.
    pub prune_floor: f64,
    /// Total mass of a probability measure.
    pub mass_total: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hyperboloid: 1e-9,
        distance_pair: 1e-6,
        determinant: 1e-9,
        lorentz_form: 1e-8,
        boundary_norm: 1e-12,
        psl_sign: 1e-9,
        key_grid: 1e-8,
        key_probe: 1e-10,
        key_audit: 1e-6,
        prune_floor: 1e-15,
        mass_total: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Resource caps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest word-length radius accepted by ball enumeration.
    pub ball_radius: usize,
    /// Largest support of a convolution power.
    pub support: usize,
    /// Largest convolution depth for entropy sequences.
    pub convolution_depth: usize,
}

impl Limits {
    pub const DEFAULT: Limits = Limits {
        ball_radius: 14,
        support: 2_000_000,
        convolution_depth: 12,
    };
}

impl Default for Limits {
    fn default() -> Self {
        Self::DEFAULT
    }
}
