//! Observation operators and synthetic data generation.
//!
//! Only the `x` component of the state is observed: `H = (1, 0, 0)`. The
//! projections `P` (onto the observed coordinate) and `Q = I - P` split every
//! error argument in the filter analysis. Discrete data are pointwise noisy
//! samples `y_k = v_x(t_k) + eps xi_k`; continuous data are the integrated
//! stream with increments `dz_k = dt v_x(t_k) + eps sqrt(dt) gamma_k`.

use crate::dynamics::{StateVec, Trajectory};
use crate::error::{Error, Result};
use crate::rng::{GaussianSource, PolarGaussian, STREAM_OBS_CONTINUOUS, STREAM_OBS_DISCRETE};

/// Observation row `H = (1, 0, 0)`; `y = H u` is the observed scalar.
pub const H_ROW: [f64; 3] = [1.0, 0.0, 0.0];

/// Projection onto the observed component: zeroes `y` and `z`.
pub fn project_p(u: StateVec) -> StateVec {
    StateVec::new(u.x, 0.0, 0.0)
}

/// Projection onto the unobserved components: zeroes `x`.
pub fn project_q(u: StateVec) -> StateVec {
    StateVec::new(0.0, u.y, u.z)
}

/// Noise scale, observation spacing, and seed for synthetic data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObsConfig {
    /// Observational noise scale `eps` (standard deviation of the noise).
    pub eps: f64,
    /// Inter-observation time for the discrete stream.
    pub h: f64,
    pub seed: u64,
}

impl ObsConfig {
    pub fn new(eps: f64, h: f64, seed: u64) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::InvalidConfig(format!("eps must be >= 0 and finite, got {eps}")));
        }
        if !(h > 0.0) {
            return Err(Error::InvalidConfig(format!("h must be positive, got {h}")));
        }
        Ok(ObsConfig { eps, h, seed })
    }
}

/// Discrete observations `y_k` at times `t_k = k h`, `k = 1, 2, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteData {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl DiscreteData {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Integrated observations on the trajectory grid: `z_0 = 0` and
/// `z_{k+1} = z_k + dz_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousData {
    pub dt: f64,
    pub increments: Vec<f64>,
}

impl ContinuousData {
    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    /// Cumulative stream `z` at grid times, starting from `z_0 = 0`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut z = Vec::with_capacity(self.increments.len() + 1);
        let mut acc = 0.0;
        z.push(acc);
        for dz in &self.increments {
            acc += dz;
            z.push(acc);
        }
        z
    }
}

/// Sample `y_k = v_x(t_k) + eps xi_k` at spacing `cfg.h` from a truth path.
///
/// `cfg.h` must be an integer multiple of the trajectory step. The noise is
/// drawn from the seeded generator's discrete-observation stream, so output
/// is deterministic given `(truth, cfg)`.
pub fn observe_discrete(truth: &Trajectory, cfg: &ObsConfig) -> Result<DiscreteData> {
    let stride = truth.stride_for(cfg.h)?;
    let n_obs = (truth.len() - 1) / stride;
    let mut gauss = PolarGaussian::with_stream(cfg.seed, STREAM_OBS_DISCRETE);
    let mut times = Vec::with_capacity(n_obs);
    let mut values = Vec::with_capacity(n_obs);
    for k in 1..=n_obs {
        times.push(k as f64 * cfg.h);
        values.push(truth.state(k * stride).x + cfg.eps * gauss.standard_normal());
    }
    Ok(DiscreteData { times, values })
}

/// Left-endpoint increments `dz_k = dt v_x(t_k) + eps sqrt(dt) gamma_k` on
/// the trajectory grid.
pub fn observe_continuous(truth: &Trajectory, cfg: &ObsConfig) -> Result<ContinuousData> {
    let mut gauss = PolarGaussian::with_stream(cfg.seed, STREAM_OBS_CONTINUOUS);
    let dt = truth.dt;
    let sqrt_dt = dt.sqrt();
    let n = truth.len() - 1;
    let mut increments = Vec::with_capacity(n);
    for k in 0..n {
        increments.push(dt * truth.state(k).x + cfg.eps * sqrt_dt * gauss.standard_normal());
    }
    Ok(ContinuousData { dt, increments })
}
