//! Numerical tolerances and enumeration caps.

use serde::{Deserialize, Serialize};

/// Default threshold operationalizing every strict "> 0" test on probabilities.
pub const EPS_ZERO: f64 = 1e-12;

/// Default threshold below which a CAR coefficient counts as zero.
pub const EPS_POS: f64 = 1e-9;

/// Default distance from the open-interval endpoints used when enumerating
/// prior extreme points.
pub const EPS_T: f64 = 1e-6;

/// Tolerances and caps shared by the inference pipelines.
///
/// All fields have working defaults; construct with `Config::default()` and
/// override what you need.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Positive-probability threshold for conditioning events.
    pub eps_zero: f64,
    /// Positivity threshold for CAR coefficients.
    pub eps_pos: f64,
    /// Offset from 0 and 1 for prior extreme points.
    pub eps_t: f64,
    /// Maximum number of cells in an enumerated joint space.
    pub max_cells: usize,
    /// Maximum number of joint vertices (or selection functions) enumerated.
    pub max_vertices: u128,
    /// Maximum completions x vertices Bayes evaluations in one CIR query.
    pub max_bayes_evals: u128,
    /// Maximum number of unknown-tagged cells enumerated by the parametric
    /// and classification pipelines.
    pub max_unknown_cells: usize,
    /// EM convergence tolerance on the parameter change.
    pub em_tol: f64,
    /// EM iteration cap.
    pub em_max_iters: u32,
    /// Seed for randomized demos.
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            eps_zero: EPS_ZERO,
            eps_pos: EPS_POS,
            eps_t: EPS_T,
            max_cells: 1 << 20,
            max_vertices: 1 << 20,
            max_bayes_evals: 1_000_000,
            max_unknown_cells: 20,
            em_tol: 1e-9,
            em_max_iters: 10_000,
            seed: 20090211,
        }
    }
}
