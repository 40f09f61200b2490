//! Continuous-time 3DVAR filter.
//!
//! The high-frequency observation limit turns the filter into the SDE
//!
//! ```text
//! dm/dt = -A m - B(m, m) + f + (1/eta) P (v - m) + (eps/eta) P dW/dt
//! ```
//!
//! integrated here by Euler-Maruyama against a precomputed truth path `v` on
//! the same grid. The Brownian forcing enters only the observed component,
//! which is distributionally identical to the R^3-noise formulation and
//! cheaper.

use crate::dynamics::{vector_field, LorenzParams, StateVec, Trajectory, DEFAULT_OVERFLOW_GUARD};
use crate::error::{Error, Result};
use crate::filter_discrete::ErrorRecord;
use crate::rng::{GaussianSource, PolarGaussian, STREAM_EM_NOISE};

/// Configuration of one continuous 3DVAR instance: `C = eta^{-1} eps^2 I`
/// and `Gamma_0 = eps^2`, so the nudging rate is `1/eta` and the noise
/// amplitude `eps/eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfigContinuous {
    pub eta: f64,
    pub eps: f64,
    /// Euler-Maruyama step.
    pub dt: f64,
    pub seed: u64,
}

impl FilterConfigContinuous {
    pub fn new(eta: f64, eps: f64, dt: f64, seed: u64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidConfig(format!("eta must be positive, got {eta}")));
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::InvalidConfig(format!("eps must be >= 0, got {eps}")));
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
        }
        Ok(FilterConfigContinuous { eta, eps, dt, seed })
    }

    /// Noise amplitude `eps/eta` of the observed component.
    pub fn noise_amplitude(&self) -> f64 {
        self.eps / self.eta
    }
}

/// Drift of the filter SDE: `-A m - B(m,m) + f + (1/eta) P (v - m)`.
pub fn drift(m: StateVec, v: StateVec, p: &LorenzParams, cfg: &FilterConfigContinuous) -> StateVec {
    let mut out = vector_field(m, p);
    out.x += (v.x - m.x) / cfg.eta;
    out
}

/// One Euler-Maruyama step:
/// `m + dt drift(m, v) + (eps/eta) sqrt(dt) xi e_1`.
pub fn em_step(
    m: StateVec,
    v: StateVec,
    dt: f64,
    p: &LorenzParams,
    cfg: &FilterConfigContinuous,
    noise: &mut impl GaussianSource,
) -> Result<StateVec> {
    let mut next = m + drift(m, v, p, cfg) * dt;
    next.x += cfg.noise_amplitude() * dt.sqrt() * noise.standard_normal();
    if !(next.max_abs() <= DEFAULT_OVERFLOW_GUARD) {
        return Err(Error::Divergence { t: dt, guard: DEFAULT_OVERFLOW_GUARD });
    }
    Ok(next)
}

/// Output of one continuous filter run: the mean path and the error process
/// at every grid time.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousRun {
    pub times: Vec<f64>,
    pub means: Vec<StateVec>,
    pub errors: Vec<ErrorRecord>,
}

/// Integrate the filter SDE along a truth path, drawing noise from the
/// seeded Euler-Maruyama stream of `cfg.seed`.
pub fn run_continuous(
    truth: &Trajectory,
    m0: StateVec,
    cfg: &FilterConfigContinuous,
    p: &LorenzParams,
) -> Result<ContinuousRun> {
    let mut noise = PolarGaussian::with_stream(cfg.seed, STREAM_EM_NOISE);
    run_continuous_with_source(truth, m0, cfg, p, &mut noise)
}

/// As [`run_continuous`] but with caller-supplied noise, which is what the
/// discrete-to-continuous consistency checks use to match increments.
pub fn run_continuous_with_source(
    truth: &Trajectory,
    m0: StateVec,
    cfg: &FilterConfigContinuous,
    p: &LorenzParams,
    noise: &mut impl GaussianSource,
) -> Result<ContinuousRun> {
    if (truth.dt - cfg.dt).abs() > 1e-12 * cfg.dt.max(1.0) {
        return Err(Error::GridMismatch(format!(
            "truth grid dt = {} does not match filter dt = {}; interpolation is not supported",
            truth.dt, cfg.dt
        )));
    }
    let n = truth.len() - 1;
    let mut times = Vec::with_capacity(n + 1);
    let mut means = Vec::with_capacity(n + 1);
    let mut errors = Vec::with_capacity(n + 1);
    let mut m = m0;
    times.push(0.0);
    means.push(m);
    errors.push(ErrorRecord::from_delta(0.0, m - truth.state(0)));
    for k in 0..n {
        m = em_step(m, truth.state(k), cfg.dt, p, cfg, noise).map_err(|e| match e {
            Error::Divergence { guard, .. } => {
                Error::Divergence { t: (k + 1) as f64 * cfg.dt, guard }
            }
            other => other,
        })?;
        let t = (k + 1) as f64 * cfg.dt;
        times.push(t);
        means.push(m);
        errors.push(ErrorRecord::from_delta(t, m - truth.state(k + 1)));
    }
    Ok(ContinuousRun { times, means, errors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{solve, spin_up, Scheme};
    use crate::observation::project_q;
    use crate::rng::ReplaySource;

    fn classical() -> LorenzParams {
        LorenzParams::classical()
    }

    #[test]
    fn drift_examples() {
        let p = classical();
        let cfg = FilterConfigContinuous::new(1.0, 0.1, 1e-4, 0).unwrap();
        // Synchronized filter: nudging vanishes.
        let v = StateVec::new(3.0, -1.0, 4.0);
        assert_eq!(drift(v, v, &p, &cfg), vector_field(v, &p));
        // eta = 1, m = (1,0,0), v = (2,0,0): nudging adds exactly e_1.
        let m = StateVec::new(1.0, 0.0, 0.0);
        let expected = vector_field(m, &p) + StateVec::new(1.0, 0.0, 0.0);
        assert_eq!(drift(m, StateVec::new(2.0, 0.0, 0.0), &p, &cfg), expected);
        // Huge eta decouples the filter from the data.
        let loose = FilterConfigContinuous::new(1e12, 0.1, 1e-4, 0).unwrap();
        let d = drift(m, StateVec::new(2.0, 0.0, 0.0), &p, &loose);
        assert!((d - vector_field(m, &p)).norm() <= 1e-11);
    }

    #[test]
    fn zero_diffusion_reduces_to_euler() {
        let p = classical();
        let cfg = FilterConfigContinuous::new(0.5, 0.0, 1e-3, 0).unwrap();
        let m = StateVec::new(1.0, 2.0, 3.0);
        let v = StateVec::new(0.5, 2.5, 2.0);
        let mut noise = ReplaySource::new(vec![123.0]); // must be ignored via eps = 0
        let stepped = em_step(m, v, 1e-3, &p, &cfg, &mut noise).unwrap();
        let expected = m + drift(m, v, &p, &cfg) * 1e-3;
        assert_eq!(stepped, expected);
    }

    #[test]
    fn noise_enters_only_observed_component() {
        let p = classical();
        let cfg = FilterConfigContinuous::new(0.5, 2.0, 1e-3, 0).unwrap();
        let m = StateVec::new(1.0, 2.0, 3.0);
        let v = StateVec::new(0.5, 2.5, 2.0);
        let d = drift(m, v, &p, &cfg);
        let mut noise = ReplaySource::new(vec![1.7, -0.3]);
        let stepped = em_step(m, v, 1e-3, &p, &cfg, &mut noise).unwrap();
        // y and z are exactly the deterministic Euler update.
        assert_eq!(stepped.y, m.y + 1e-3 * d.y);
        assert_eq!(stepped.z, m.z + 1e-3 * d.z);
        assert_eq!(project_q(stepped), project_q(m + d * 1e-3));
        assert_ne!(stepped.x, m.x + 1e-3 * d.x);
    }

    #[test]
    fn diffusion_variance_matches_coefficient() {
        let p = classical();
        let cfg = FilterConfigContinuous::new(0.4, 0.8, 1e-3, 77).unwrap();
        let m = StateVec::new(1.0, 2.0, 3.0);
        let v = StateVec::new(0.5, 2.5, 2.0);
        let d = drift(m, v, &p, &cfg);
        let mut noise = PolarGaussian::new(77);
        let n = 100_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let stepped = em_step(m, v, 1e-3, &p, &cfg, &mut noise).unwrap();
            let incr = stepped.x - m.x - 1e-3 * d.x;
            sum += incr;
            sum_sq += incr * incr;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        let expected = cfg.noise_amplitude() * cfg.noise_amplitude() * 1e-3;
        assert!(
            (var - expected).abs() <= 0.05 * expected,
            "var = {var}, expected about {expected}"
        );
    }

    #[test]
    fn synchronized_noiseless_run_has_zero_error() {
        let p = classical();
        let v0 = spin_up(StateVec::new(1.0, 1.0, 1.0), 10.0, 1e-3, &p).unwrap();
        let truth = solve(v0, 1.0, 1e-3, &p, Scheme::ExplicitEuler).unwrap();
        let cfg = FilterConfigContinuous::new(0.01, 0.0, 1e-3, 5).unwrap();
        let run = run_continuous(&truth, v0, &cfg, &p).unwrap();
        for rec in &run.errors {
            assert_eq!(rec.delta_sq, 0.0);
        }
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let p = classical();
        let truth = solve(StateVec::new(1.0, 1.0, 1.0), 1.0, 1e-3, &p, Scheme::ExplicitEuler)
            .unwrap();
        let cfg = FilterConfigContinuous::new(0.01, 0.1, 1e-4, 5).unwrap();
        assert!(matches!(
            run_continuous(&truth, StateVec::ZERO, &cfg, &p),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn runs_are_seed_deterministic() {
        let p = classical();
        let v0 = spin_up(StateVec::new(1.0, 1.0, 1.0), 10.0, 1e-3, &p).unwrap();
        let truth = solve(v0, 0.5, 1e-3, &p, Scheme::ExplicitEuler).unwrap();
        let cfg = FilterConfigContinuous::new(0.01, 0.1, 1e-3, 5).unwrap();
        let m0 = v0 + StateVec::new(1.0, -1.0, 0.5);
        let a = run_continuous(&truth, m0, &cfg, &p).unwrap();
        let b = run_continuous(&truth, m0, &cfg, &p).unwrap();
        assert_eq!(a, b);
        let other = FilterConfigContinuous { seed: 6, ..cfg };
        let c = run_continuous(&truth, m0, &other, &p).unwrap();
        assert_ne!(a, c);
    }
}
