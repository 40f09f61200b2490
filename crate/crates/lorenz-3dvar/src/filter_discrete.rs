//! Discrete-time 3DVAR filter.
//!
//! Between observations the mean is propagated by the model; when `y_{k+1}`
//! arrives the analysis applies the fixed-gain Kalman update
//! `m <- (I - G H) Psi(m) + G y` with `G = C H* (Gamma + H C H*)^{-1}`. For
//! the partially observed Lorenz setup (`H = (1,0,0)`, `C = eta^{-1} eps^2 I`,
//! `Gamma = eps^2`) the gain collapses to `G = H* / (1 + eta)`, so the update
//! blends only the observed component:
//!
//! ```text
//! m_{k+1} = (eta/(1+eta)) P Psi(m_k) + Q Psi(m_k) + y_{k+1} H* / (1+eta)
//! ```
//!
//! The same update is the minimizer of the variational objective
//! `1/2 |C^{-1/2}(m - Psi(m_k))|^2 + 1/2 |Gamma^{-1/2}(y - H m)|^2`.

use crate::dynamics::{step_with_guard, LorenzParams, Scheme, StateVec, Trajectory};
use crate::dynamics::DEFAULT_OVERFLOW_GUARD;
use crate::error::{Error, Result};
use crate::observation::{DiscreteData, H_ROW};

/// When the error process is sampled relative to the analysis step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorTiming {
    /// `delta(t_k)`: after the Kalman update (the quantity the accuracy
    /// theory bounds).
    #[default]
    PostAnalysis,
    /// `delta(t_k^-)`: the forecast error just before the update.
    PreAnalysis,
}

/// Configuration of one discrete 3DVAR instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfigDiscrete {
    /// Variance-inflation ratio: the model covariance is `eta^{-1} eps^2 I`.
    pub eta: f64,
    /// Observational noise scale (`Gamma = eps^2`).
    pub eps: f64,
    /// Observation spacing.
    pub h: f64,
    /// Internal forecast step; must divide `h` exactly.
    pub dt_model: f64,
    pub scheme: Scheme,
    pub error_timing: ErrorTiming,
}

impl FilterConfigDiscrete {
    pub fn new(eta: f64, eps: f64, h: f64, dt_model: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidConfig(format!("eta must be positive, got {eta}")));
        }
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::InvalidConfig(format!("eps must be >= 0, got {eps}")));
        }
        if !(h > 0.0) || !(dt_model > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "h and dt_model must be positive, got h = {h}, dt_model = {dt_model}"
            )));
        }
        let ratio = h / dt_model;
        if (ratio - ratio.round()).abs() > 1e-12 * ratio.max(1.0) || ratio.round() < 1.0 {
            return Err(Error::GridMismatch(format!(
                "dt_model = {dt_model} does not divide h = {h}"
            )));
        }
        Ok(FilterConfigDiscrete {
            eta,
            eps,
            h,
            dt_model,
            scheme: Scheme::ExplicitEuler,
            error_timing: ErrorTiming::PostAnalysis,
        })
    }

    /// Scalar gain `g = 1/(1 + eta)` of the specialized update.
    pub fn gain_scalar(&self) -> f64 {
        1.0 / (1.0 + self.eta)
    }

    /// Gain column `G = H* / (1 + eta)`.
    pub fn gain(&self) -> StateVec {
        StateVec::new(self.gain_scalar(), 0.0, 0.0)
    }

    fn substeps(&self) -> usize {
        (self.h / self.dt_model).round() as usize
    }
}

/// General Kalman gain `G = C H* (Gamma + H C H*)^{-1}` for a scalar
/// observation; `c` is symmetric positive definite, row-major.
pub fn kalman_gain(c: &[[f64; 3]; 3], h_row: [f64; 3], gamma: f64) -> Result<StateVec> {
    let ch = [
        c[0][0] * h_row[0] + c[0][1] * h_row[1] + c[0][2] * h_row[2],
        c[1][0] * h_row[0] + c[1][1] * h_row[1] + c[1][2] * h_row[2],
        c[2][0] * h_row[0] + c[2][1] * h_row[1] + c[2][2] * h_row[2],
    ];
    let innovation_var = gamma + h_row[0] * ch[0] + h_row[1] * ch[1] + h_row[2] * ch[2];
    if !(innovation_var > 0.0) {
        return Err(Error::SingularInnovation(innovation_var));
    }
    Ok(StateVec::new(ch[0] / innovation_var, ch[1] / innovation_var, ch[2] / innovation_var))
}

/// Analysis update `m = forecast + G (y - H forecast)`.
///
/// With a gain whose unobserved components are exactly zero, the `y` and `z`
/// components of the forecast pass through bitwise.
pub fn analysis_update(forecast: StateVec, y: f64, gain: StateVec, h_row: [f64; 3]) -> StateVec {
    let predicted = h_row[0] * forecast.x + h_row[1] * forecast.y + h_row[2] * forecast.z;
    let innovation = y - predicted;
    StateVec::new(
        forecast.x + gain.x * innovation,
        forecast.y + gain.y * innovation,
        forecast.z + gain.z * innovation,
    )
}

/// The 3DVAR objective whose unique minimizer is the analysis update:
/// `1/2 (eta/eps^2) |m - forecast|^2 + 1/2 (1/eps^2) (y - m_x)^2`.
pub fn variational_objective(
    m: StateVec,
    forecast: StateVec,
    y: f64,
    cfg: &FilterConfigDiscrete,
) -> f64 {
    let inv_gamma = 1.0 / (cfg.eps * cfg.eps);
    let inv_c = cfg.eta * inv_gamma;
    let model_misfit = (m - forecast).norm_sq();
    let predicted = H_ROW[0] * m.x + H_ROW[1] * m.y + H_ROW[2] * m.z;
    let data_misfit = (y - predicted) * (y - predicted);
    0.5 * inv_c * model_misfit + 0.5 * inv_gamma * data_misfit
}

/// Time-stamped squared-error sample `(|d|^2, |Pd|^2, ||d||^2)` with
/// `||d||^2 = |d|^2 + |Pd|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub t: f64,
    pub delta_sq: f64,
    pub p_delta_sq: f64,
    pub norm_sq: f64,
}

impl ErrorRecord {
    pub fn from_delta(t: f64, delta: StateVec) -> Self {
        let delta_sq = delta.norm_sq();
        let p_delta_sq = delta.x * delta.x;
        ErrorRecord { t, delta_sq, p_delta_sq, norm_sq: delta_sq + p_delta_sq }
    }
}

/// Output of one filter run: analysis means and the error process sampled at
/// observation times.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterRun {
    pub times: Vec<f64>,
    pub means: Vec<StateVec>,
    pub errors: Vec<ErrorRecord>,
}

/// Run the discrete filter against a truth path and its observations.
///
/// The truth must be sampled on a grid that both `h` and the data times sit
/// on; the forecast integrates with `cfg.dt_model` between analyses. The
/// error record at `t = 0` is always `m_0 - v(0)`; later records follow
/// `cfg.error_timing`.
pub fn run_filter(
    truth: &Trajectory,
    data: &DiscreteData,
    m0: StateVec,
    cfg: &FilterConfigDiscrete,
    p: &LorenzParams,
) -> Result<FilterRun> {
    let stride = truth.stride_for(cfg.h)?;
    let n_obs = data.len();
    if n_obs * stride > truth.len() - 1 {
        return Err(Error::GridMismatch(format!(
            "truth covers {} observation intervals but data holds {n_obs}",
            (truth.len() - 1) / stride
        )));
    }
    for (k, &t) in data.times.iter().enumerate() {
        let expected = (k + 1) as f64 * cfg.h;
        if (t - expected).abs() > 1e-9 * expected.max(1.0) {
            return Err(Error::GridMismatch(format!(
                "data time {t} at index {k} does not sit on the observation grid (expected {expected})"
            )));
        }
    }
    let gain = cfg.gain();
    let n_sub = cfg.substeps();
    let mut m = m0;
    let mut times = Vec::with_capacity(n_obs + 1);
    let mut means = Vec::with_capacity(n_obs + 1);
    let mut errors = Vec::with_capacity(n_obs + 1);
    times.push(0.0);
    means.push(m);
    errors.push(ErrorRecord::from_delta(0.0, m - truth.state(0)));
    for k in 0..n_obs {
        for j in 0..n_sub {
            m = step_with_guard(m, cfg.dt_model, p, cfg.scheme, DEFAULT_OVERFLOW_GUARD).map_err(
                |e| match e {
                    Error::Divergence { guard, .. } => Error::Divergence {
                        t: k as f64 * cfg.h + (j + 1) as f64 * cfg.dt_model,
                        guard,
                    },
                    other => other,
                },
            )?;
        }
        let t = (k + 1) as f64 * cfg.h;
        let v = truth.state((k + 1) * stride);
        let forecast = m;
        m = analysis_update(forecast, data.values[k], gain, H_ROW);
        let sampled = match cfg.error_timing {
            ErrorTiming::PostAnalysis => m,
            ErrorTiming::PreAnalysis => forecast,
        };
        times.push(t);
        means.push(m);
        errors.push(ErrorRecord::from_delta(t, sampled - v));
    }
    Ok(FilterRun { times, means, errors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{solve, vector_field};
    use crate::observation::{observe_discrete, project_p, project_q, ObsConfig};
    use crate::rng::{GaussianSource, PolarGaussian};

    fn classical() -> LorenzParams {
        LorenzParams::classical()
    }

    fn diag(v: f64) -> [[f64; 3]; 3] {
        [[v, 0.0, 0.0], [0.0, v, 0.0], [0.0, 0.0, v]]
    }

    #[test]
    fn specialized_gain_matches_closed_form() {
        // C = eta^{-1} eps^2 I, Gamma = eps^2, eta = 0.1 -> G = (1/1.1, 0, 0).
        let (eta, eps) = (0.1, 0.7);
        let c = diag(eps * eps / eta);
        let g = kalman_gain(&c, H_ROW, eps * eps).unwrap();
        assert!((g.x - 1.0 / 1.1).abs() <= 1e-14);
        assert_eq!(g.y, 0.0);
        assert_eq!(g.z, 0.0);
    }

    #[test]
    fn vanishing_covariance_trusts_the_model() {
        let c = diag(1e-30);
        let g = kalman_gain(&c, H_ROW, 1.0).unwrap();
        assert!(g.x.abs() <= 1e-20 && g.y == 0.0 && g.z == 0.0);
    }

    #[test]
    fn general_spd_gain_matches_linear_algebra_oracle() {
        let mut rng = PolarGaussian::new(3);
        for _ in 0..200 {
            // Random SPD matrix M M^T + 0.1 I.
            let mut m = [[0.0; 3]; 3];
            for row in &mut m {
                for entry in row.iter_mut() {
                    *entry = rng.standard_normal();
                }
            }
            let mut c = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    c[i][j] = (0..3).map(|k| m[i][k] * m[j][k]).sum::<f64>();
                }
                c[i][i] += 0.1;
            }
            let gamma = 0.5 + rng.standard_normal().abs();
            let g = kalman_gain(&c, H_ROW, gamma).unwrap();
            // With H = (1,0,0) the gain is the first column over the scalar
            // innovation variance.
            let denom = gamma + c[0][0];
            for (gi, ci) in [g.x, g.y, g.z].iter().zip([c[0][0], c[1][0], c[2][0]]) {
                assert!((gi - ci / denom).abs() <= 1e-14 * (ci / denom).abs().max(1.0));
            }
        }
    }

    #[test]
    fn singular_innovation_is_rejected() {
        let c = diag(0.0);
        assert!(matches!(kalman_gain(&c, H_ROW, 0.0), Err(Error::SingularInnovation(_))));
    }

    #[test]
    fn analysis_examples() {
        let cfg = FilterConfigDiscrete::new(0.1, 1.0, 0.01, 0.01).unwrap();
        let forecast = StateVec::new(2.0, 3.0, 4.0);
        // Data agreeing with the forecast changes nothing.
        let same = analysis_update(forecast, 2.0, cfg.gain(), H_ROW);
        assert_eq!(same, forecast);
        // eta = 0.1: x <- (eta x + y)/(1+eta), y and z untouched.
        let out = analysis_update(forecast, 1.0, cfg.gain(), H_ROW);
        assert!((out.x - (0.2 + 1.0) / 1.1).abs() <= 1e-14);
        assert_eq!(out.y, 3.0);
        assert_eq!(out.z, 4.0);
        // eta -> 0 gives full data trust in the observed component.
        let tiny = FilterConfigDiscrete::new(1e-300, 1.0, 0.01, 0.01).unwrap();
        let full = analysis_update(forecast, 1.0, tiny.gain(), H_ROW);
        assert_eq!(full.x, 1.0);
        assert_eq!(full.y, 3.0);
        assert_eq!(full.z, 4.0);
    }

    #[test]
    fn analysis_matches_projection_form() {
        // (I - GH) Psi + G y == (eta/(1+eta)) P Psi + Q Psi + y H*/(1+eta).
        let mut rng = PolarGaussian::new(8);
        for _ in 0..1000 {
            let eta = 0.01 + rng.uniform() * 2.0;
            let cfg = FilterConfigDiscrete::new(eta, 1.0, 0.01, 0.01).unwrap();
            let forecast = StateVec::new(
                10.0 * rng.standard_normal(),
                10.0 * rng.standard_normal(),
                10.0 * rng.standard_normal(),
            );
            let y = 10.0 * rng.standard_normal();
            let lhs = analysis_update(forecast, y, cfg.gain(), H_ROW);
            let g = cfg.gain_scalar();
            let rhs = project_p(forecast) * (eta * g) + project_q(forecast)
                + StateVec::new(y * g, 0.0, 0.0);
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn gain_interpolation_is_convex_and_monotone() {
        let mut rng = PolarGaussian::new(9);
        for _ in 0..500 {
            let m_fx = 5.0 * rng.standard_normal();
            let y = 5.0 * rng.standard_normal();
            let forecast = StateVec::new(m_fx, 0.0, 0.0);
            let etas = [0.05, 0.3, 1.5];
            let xs: Vec<f64> = etas
                .iter()
                .map(|&eta| {
                    let cfg = FilterConfigDiscrete::new(eta, 1.0, 0.01, 0.01).unwrap();
                    let out = analysis_update(forecast, y, cfg.gain(), H_ROW);
                    let expected = (eta * m_fx + y) / (1.0 + eta);
                    assert!((out.x - expected).abs() <= 1e-12 * expected.abs().max(1.0));
                    out.x
                })
                .collect();
            // Monotone from y toward the forecast as eta grows.
            assert!((xs[1] - xs[0]) * (m_fx - y) >= -1e-12);
            assert!((xs[2] - xs[1]) * (m_fx - y) >= -1e-12);
        }
    }

    fn fd_gradient(
        m: StateVec,
        forecast: StateVec,
        y: f64,
        cfg: &FilterConfigDiscrete,
    ) -> StateVec {
        let step = 1e-6;
        let eval = |m: StateVec| variational_objective(m, forecast, y, cfg);
        StateVec::new(
            (eval(m + StateVec::new(step, 0.0, 0.0)) - eval(m - StateVec::new(step, 0.0, 0.0)))
                / (2.0 * step),
            (eval(m + StateVec::new(0.0, step, 0.0)) - eval(m - StateVec::new(0.0, step, 0.0)))
                / (2.0 * step),
            (eval(m + StateVec::new(0.0, 0.0, step)) - eval(m - StateVec::new(0.0, 0.0, step)))
                / (2.0 * step),
        )
    }

    #[test]
    fn analysis_minimizes_variational_objective() {
        let mut rng = PolarGaussian::new(10);
        for _ in 0..100 {
            let eta = 0.05 + rng.uniform() * 0.45;
            let eps = 0.5 + rng.uniform() * 1.5;
            let cfg = FilterConfigDiscrete::new(eta, eps, 0.01, 0.01).unwrap();
            let forecast = StateVec::new(
                5.0 * rng.standard_normal(),
                5.0 * rng.standard_normal(),
                5.0 * rng.standard_normal(),
            );
            let y = forecast.x + rng.standard_normal();
            let argmin = analysis_update(forecast, y, cfg.gain(), H_ROW);
            let grad = fd_gradient(argmin, forecast, y, &cfg);
            assert!(grad.norm() <= 1e-8, "gradient norm {} at minimizer", grad.norm());
            let at_min = variational_objective(argmin, forecast, y, &cfg);
            for _ in 0..100 {
                let mut dir = StateVec::new(
                    rng.standard_normal(),
                    rng.standard_normal(),
                    rng.standard_normal(),
                );
                dir = dir * (0.1 / dir.norm());
                assert!(variational_objective(argmin + dir, forecast, y, &cfg) >= at_min);
            }
        }
    }

    #[test]
    fn objective_argmin_is_scale_invariant() {
        // Multiplying both covariances by the same factor rescales the
        // objective uniformly, so the minimizer cannot move.
        let forecast = StateVec::new(2.0, -1.0, 0.5);
        let y = 3.0;
        let small = FilterConfigDiscrete::new(0.2, 0.3, 0.01, 0.01).unwrap();
        let large = FilterConfigDiscrete::new(0.2, 3.0, 0.01, 0.01).unwrap();
        let a = analysis_update(forecast, y, small.gain(), H_ROW);
        let b = analysis_update(forecast, y, large.gain(), H_ROW);
        assert_eq!(a, b);
        let ratio = variational_objective(a, forecast, y, &small)
            / variational_objective(a, forecast, y, &large);
        assert!((ratio - 100.0).abs() <= 1e-9 * 100.0);
    }

    #[test]
    fn zero_noise_zero_initial_error_tracks_exactly() {
        let p = classical();
        let v0 = StateVec::new(4.0, -3.0, 2.0);
        let truth = solve(v0, 1.0, 1e-3, &p, Scheme::ExplicitEuler).unwrap();
        let cfg = FilterConfigDiscrete::new(0.1, 0.0, 0.01, 1e-3).unwrap();
        let data = observe_discrete(&truth, &ObsConfig::new(0.0, 0.01, 0).unwrap()).unwrap();
        let run = run_filter(&truth, &data, v0, &cfg, &p).unwrap();
        for rec in &run.errors {
            assert_eq!(rec.delta_sq, 0.0);
            assert_eq!(rec.norm_sq, 0.0);
        }
    }

    #[test]
    fn analysis_never_touches_unobserved_components() {
        let p = classical();
        let v0 = StateVec::new(4.0, -3.0, 2.0);
        let truth = solve(v0, 0.5, 1e-3, &p, Scheme::ExplicitEuler).unwrap();
        let cfg = FilterConfigDiscrete::new(0.1, 0.5, 0.01, 1e-3).unwrap();
        let data = observe_discrete(&truth, &ObsConfig::new(0.5, 0.01, 4).unwrap()).unwrap();
        let m0 = v0 + StateVec::new(1.0, 1.0, -1.0);
        let run = run_filter(&truth, &data, m0, &cfg, &p).unwrap();
        // Re-propagate each analysis mean one observation interval: the
        // filter's next mean must match it bitwise in y and z.
        for k in 0..data.len() {
            let mut fwd = run.means[k];
            for _ in 0..10 {
                fwd = step_with_guard(fwd, 1e-3, &p, cfg.scheme, 1e6).unwrap();
            }
            assert_eq!(run.means[k + 1].y, fwd.y);
            assert_eq!(run.means[k + 1].z, fwd.z);
        }
    }

    #[test]
    fn single_step_matches_mean_recursion_oracle() {
        // One analysis step equals
        // (eta/(1+eta)) P Psi(m) + Q Psi(m) + (P Psi(v) + nu)/(1+eta)
        // re-derived independently from random ingredients.
        let mut rng = PolarGaussian::new(12);
        for _ in 0..1000 {
            let eta = 0.02 + rng.uniform();
            let eps = 0.1 + rng.uniform();
            let cfg = FilterConfigDiscrete::new(eta, eps, 0.01, 0.01).unwrap();
            let psi_m = StateVec::new(
                10.0 * rng.standard_normal(),
                10.0 * rng.standard_normal(),
                10.0 * rng.standard_normal(),
            );
            let psi_v = StateVec::new(
                10.0 * rng.standard_normal(),
                10.0 * rng.standard_normal(),
                10.0 * rng.standard_normal(),
            );
            let xi = rng.standard_normal();
            let y = psi_v.x + eps * xi;
            let lhs = analysis_update(psi_m, y, cfg.gain(), H_ROW);
            let g = cfg.gain_scalar();
            let nu = StateVec::new(eps * xi, 0.0, 0.0);
            let rhs = project_p(psi_m) * (eta * g)
                + project_q(psi_m)
                + (project_p(psi_v) + nu) * g;
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn pre_analysis_records_differ_from_post() {
        let p = classical();
        let v0 = StateVec::new(4.0, -3.0, 2.0);
        let truth = solve(v0, 0.5, 1e-3, &p, Scheme::ExplicitEuler).unwrap();
        let data = observe_discrete(&truth, &ObsConfig::new(0.5, 0.01, 4).unwrap()).unwrap();
        let m0 = v0 + StateVec::new(1.0, 0.0, 0.0);
        let mut cfg = FilterConfigDiscrete::new(0.1, 0.5, 0.01, 1e-3).unwrap();
        let post = run_filter(&truth, &data, m0, &cfg, &p).unwrap();
        cfg.error_timing = ErrorTiming::PreAnalysis;
        let pre = run_filter(&truth, &data, m0, &cfg, &p).unwrap();
        assert_eq!(post.means, pre.means);
        assert_ne!(post.errors, pre.errors);
    }

    #[test]
    fn config_rejects_misaligned_model_step() {
        assert!(matches!(
            FilterConfigDiscrete::new(0.1, 1.0, 0.01, 0.003),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn equilibrium_start_is_stationary() {
        // From the equilibrium with zero noise the filter never moves.
        let p = classical();
        let eq = p.equilibrium();
        assert_eq!(vector_field(eq, &p), StateVec::ZERO);
        let truth = solve(eq, 0.2, 1e-3, &p, Scheme::ExplicitEuler).unwrap();
        let cfg = FilterConfigDiscrete::new(0.1, 0.0, 0.01, 1e-3).unwrap();
        let data = observe_discrete(&truth, &ObsConfig::new(0.0, 0.01, 0).unwrap()).unwrap();
        let run = run_filter(&truth, &data, eq, &cfg, &p).unwrap();
        for mean in &run.means {
            assert_eq!(*mean, eq);
        }
    }
}
