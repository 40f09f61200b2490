//! Figure-reproduction experiments: error decay and noise-scaling studies.

use rayon::prelude::*;

use crate::csv_io::{fmt_f64, render_csv, render_errors};
use crate::dynamics::{solve, spin_up, LorenzParams, StateVec, Trajectory};
use crate::error::{Error, Result};
use crate::filter_continuous::{em_step, run_continuous, FilterConfigContinuous};
use crate::filter_discrete::{run_filter, ErrorRecord, FilterConfigDiscrete};
use crate::harness::{Averaging, ExperimentKind, ExperimentSpec};
use crate::observation::{observe_discrete, ObsConfig};
use crate::rng::{member_seed, GaussianSource, PolarGaussian, STREAM_INIT_PERTURBATION};

/// Build a rayon pool with `threads` workers (0 keeps rayon's default).
pub fn worker_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build worker pool: {e}")))
}

/// Truth path for an experiment: spin-up from `(1, 1, 1)` followed by a
/// solve over the horizon on the experiment's grid.
pub fn generate_truth(spec: &ExperimentSpec, p: &LorenzParams) -> Result<Trajectory> {
    let u0 = spin_up(StateVec::new(1.0, 1.0, 1.0), spec.t_burn, spec.dt, p)?;
    solve(u0, spec.horizon, spec.dt, p, spec.scheme)
}

/// Initial filter mean: truth plus a `delta0`-sized perturbation in a
/// seed-derived random direction.
pub fn initial_mean(v0: StateVec, delta0: f64, seed: u64) -> StateVec {
    if delta0 == 0.0 {
        return v0;
    }
    let mut g = PolarGaussian::with_stream(seed, STREAM_INIT_PERTURBATION);
    loop {
        let dir = StateVec::new(g.standard_normal(), g.standard_normal(), g.standard_normal());
        let n = dir.norm();
        if n > 1e-12 {
            return v0 + dir * (delta0 / n);
        }
    }
}

fn run_one_discrete(
    truth: &Trajectory,
    spec: &ExperimentSpec,
    p: &LorenzParams,
    eta: f64,
    eps: f64,
    seed: u64,
) -> Result<Vec<ErrorRecord>> {
    let cfg = FilterConfigDiscrete { scheme: spec.scheme, ..FilterConfigDiscrete::new(eta, eps, spec.h, spec.dt)? };
    let data = observe_discrete(truth, &ObsConfig::new(eps, spec.h, seed)?)?;
    let m0 = initial_mean(truth.state(0), spec.delta0, seed);
    Ok(run_filter(truth, &data, m0, &cfg, p)?.errors)
}

fn run_one_continuous(
    truth: &Trajectory,
    spec: &ExperimentSpec,
    p: &LorenzParams,
    eta: f64,
    eps: f64,
    seed: u64,
) -> Result<Vec<ErrorRecord>> {
    let cfg = FilterConfigContinuous::new(eta, eps, spec.dt, seed)?;
    let m0 = initial_mean(truth.state(0), spec.delta0, seed);
    Ok(run_continuous(truth, m0, &cfg, p)?.errors)
}

/// Endpoint error of one continuous member without materializing the path;
/// ensemble slope estimates only need `|delta(T)|^2`.
fn continuous_final_delta_sq(
    truth: &Trajectory,
    spec: &ExperimentSpec,
    p: &LorenzParams,
    eta: f64,
    eps: f64,
    seed: u64,
) -> Result<f64> {
    let cfg = FilterConfigContinuous::new(eta, eps, spec.dt, seed)?;
    let mut noise = PolarGaussian::with_stream(seed, crate::rng::STREAM_EM_NOISE);
    let mut m = initial_mean(truth.state(0), spec.delta0, seed);
    for k in 0..truth.len() - 1 {
        m = em_step(m, truth.state(k), cfg.dt, p, &cfg, &mut noise).map_err(|e| match e {
            Error::Divergence { guard, .. } => {
                Error::Divergence { t: (k + 1) as f64 * cfg.dt, guard }
            }
            other => other,
        })?;
    }
    Ok((m - truth.last()).norm_sq())
}

/// Summary of one decay run.
#[derive(Debug, Clone)]
pub struct DecayOutcome {
    /// First time with `|delta| < 3 eps`; `None` when never reached
    /// (always for `eps = 0`).
    pub time_to_threshold: Option<f64>,
    /// Mean of `|delta|` over the post-burn-in tail.
    pub post_transient_mean_error: f64,
    /// Fraction of post-burn-in records with `|delta| < 3 eps`.
    pub post_transient_fraction_below: f64,
    /// Windowed error maxima are non-increasing over ten windows.
    pub envelope_monotone: bool,
    pub records: Vec<ErrorRecord>,
    /// Full CSV document of the (possibly thinned) error records.
    pub csv: String,
}

/// Stride that keeps CSV output near 20k rows for long continuous runs.
fn record_stride(len: usize) -> usize {
    len.div_ceil(20_000).max(1)
}

fn summarize_decay(records: &[ErrorRecord], spec: &ExperimentSpec, eps: f64) -> DecayOutcome {
    let threshold = 3.0 * eps;
    let time_to_threshold = records
        .iter()
        .find(|r| r.delta_sq.sqrt() < threshold)
        .map(|r| r.t);
    let t_tail = spec.burn_in * spec.horizon;
    let tail: Vec<&ErrorRecord> = records.iter().filter(|r| r.t >= t_tail).collect();
    let post_transient_mean_error = if tail.is_empty() {
        f64::NAN
    } else {
        tail.iter().map(|r| r.delta_sq.sqrt()).sum::<f64>() / tail.len() as f64
    };
    let post_transient_fraction_below = if tail.is_empty() {
        0.0
    } else {
        tail.iter().filter(|r| r.delta_sq.sqrt() < threshold).count() as f64 / tail.len() as f64
    };
    // Envelope: maxima over ten equal windows must not increase.
    let windows = 10;
    let per = records.len().div_ceil(windows).max(1);
    let maxima: Vec<f64> = records
        .chunks(per)
        .map(|c| c.iter().map(|r| r.delta_sq.sqrt()).fold(0.0, f64::max))
        .collect();
    let envelope_monotone = maxima.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let stride = record_stride(records.len());
    let thinned: Vec<ErrorRecord> = records.iter().step_by(stride).copied().collect();
    let mut meta = spec.meta();
    meta.push(("record_stride".to_string(), stride.to_string()));
    DecayOutcome {
        time_to_threshold,
        post_transient_mean_error,
        post_transient_fraction_below,
        envelope_monotone,
        csv: render_errors(&thinned, &meta),
        records: records.to_vec(),
    }
}

/// Run a single-path decay experiment (discrete or continuous regime).
pub fn run_decay(spec: &ExperimentSpec) -> Result<DecayOutcome> {
    spec.validate()?;
    let p = spec.params()?;
    let truth = generate_truth(spec, &p)?;
    let eta = spec.effective_eta();
    let records = match spec.kind {
        ExperimentKind::DecayDiscrete => {
            run_one_discrete(&truth, spec, &p, eta, spec.eps, spec.seed)?
        }
        ExperimentKind::DecayContinuous => {
            run_one_continuous(&truth, spec, &p, eta, spec.eps, spec.seed)?
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "run_decay needs a decay kind, got `{other}`"
            )))
        }
    };
    Ok(summarize_decay(&records, spec, spec.eps))
}

/// Ordinary least squares of `y` on `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitLine {
    pub slope: f64,
    pub intercept: f64,
    /// Euclidean norm of the fit residuals.
    pub residual_norm: f64,
}

/// OLS fit in log-log coordinates.
pub fn log_log_fit(eps: &[f64], mse: &[f64]) -> Result<FitLine> {
    if eps.len() != mse.len() || eps.len() < 2 {
        return Err(Error::InvalidConfig("log-log fit needs at least two points".to_string()));
    }
    if mse.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidConfig("log-log fit needs positive MSE values".to_string()));
    }
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = mse.iter().map(|m| m.ln()).collect();
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("log-log fit needs distinct eps values".to_string()));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let residual_norm = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum::<f64>()
        .sqrt();
    Ok(FitLine { slope, intercept, residual_norm })
}

/// Per-noise-level asymptotic MSE estimates.
#[derive(Debug, Clone, Copy)]
pub struct EpsEstimate {
    pub eps: f64,
    pub mse_time: Option<f64>,
    pub mse_ensemble: Option<f64>,
    /// Standard error of the ensemble estimate (sample sd over sqrt(N)).
    pub se_ensemble: Option<f64>,
}

/// Result of a noise-scaling study.
#[derive(Debug, Clone)]
pub struct SlopeOutcome {
    pub estimates: Vec<EpsEstimate>,
    pub fit_time: Option<FitLine>,
    pub fit_ensemble: Option<FitLine>,
    pub averaging: Averaging,
    pub csv: String,
}

fn tail_mean_delta_sq(records: &[ErrorRecord], t_tail: f64) -> f64 {
    let tail: Vec<f64> =
        records.iter().filter(|r| r.t >= t_tail).map(|r| r.delta_sq).collect();
    tail.iter().sum::<f64>() / tail.len() as f64
}

/// Estimate asymptotic `E|delta|^2` for every `eps` in the grid and fit the
/// log-log line(s).
///
/// Ensemble members fan out to the pool; results are reduced in member
/// order, so output is identical for any thread count.
pub fn run_slope(spec: &ExperimentSpec, threads: usize) -> Result<SlopeOutcome> {
    spec.validate()?;
    let p = spec.params()?;
    let truth = generate_truth(spec, &p)?;
    let eta = spec.effective_eta();
    let discrete = match spec.kind {
        ExperimentKind::SlopeDiscrete => true,
        ExperimentKind::SlopeContinuous => false,
        other => {
            return Err(Error::InvalidConfig(format!(
                "run_slope needs a slope kind, got `{other}`"
            )))
        }
    };
    let pool = worker_pool(threads)?;
    let t_tail = spec.burn_in * spec.horizon;
    let want_time = matches!(spec.averaging, Averaging::Time | Averaging::Both);
    let want_ensemble = matches!(spec.averaging, Averaging::Ensemble | Averaging::Both);
    let mut estimates = Vec::with_capacity(spec.eps_grid.len());
    for (eps_idx, &eps) in spec.eps_grid.iter().enumerate() {
        // Lane seed separates the eps levels; member seeds separate the
        // realizations within a lane.
        let lane_seed = member_seed(spec.seed, 1_000_000 + eps_idx as u64);
        let mse_time = if want_time {
            let records = if discrete {
                run_one_discrete(&truth, spec, &p, eta, eps, lane_seed)?
            } else {
                run_one_continuous(&truth, spec, &p, eta, eps, lane_seed)?
            };
            Some(tail_mean_delta_sq(&records, t_tail))
        } else {
            None
        };
        let (mse_ensemble, se_ensemble) = if want_ensemble {
            let finals: Vec<Result<f64>> = pool.install(|| {
                (0..spec.ensemble)
                    .into_par_iter()
                    .map(|i| {
                        let seed = member_seed(lane_seed, i as u64);
                        if discrete {
                            let records = run_one_discrete(&truth, spec, &p, eta, eps, seed)?;
                            Ok(records.last().expect("runs produce records").delta_sq)
                        } else {
                            continuous_final_delta_sq(&truth, spec, &p, eta, eps, seed)
                        }
                    })
                    .collect()
            });
            let n = spec.ensemble as f64;
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for r in finals {
                let v = r?;
                sum += v;
                sum_sq += v * v;
            }
            let mean = sum / n;
            let var = if spec.ensemble > 1 { (sum_sq - n * mean * mean) / (n - 1.0) } else { 0.0 };
            (Some(mean), Some((var.max(0.0) / n).sqrt()))
        } else {
            (None, None)
        };
        estimates.push(EpsEstimate { eps, mse_time, mse_ensemble, se_ensemble });
    }

    let fit_for = |pick: fn(&EpsEstimate) -> Option<f64>| -> Result<Option<FitLine>> {
        let points: Vec<(f64, f64)> =
            estimates.iter().filter_map(|e| pick(e).map(|m| (e.eps, m))).collect();
        if points.is_empty() {
            return Ok(None);
        }
        let (eps, mse): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        log_log_fit(&eps, &mse).map(Some)
    };
    let fit_time = fit_for(|e| e.mse_time)?;
    let fit_ensemble = fit_for(|e| e.mse_ensemble)?;

    let mut meta = spec.meta();
    if let Some(f) = &fit_time {
        meta.push(("slope_time".to_string(), fmt_f64(f.slope)));
        meta.push(("intercept_time".to_string(), fmt_f64(f.intercept)));
    }
    if let Some(f) = &fit_ensemble {
        meta.push(("slope_ensemble".to_string(), fmt_f64(f.slope)));
        meta.push(("intercept_ensemble".to_string(), fmt_f64(f.intercept)));
    }
    let (header, rows): (&str, Vec<Vec<f64>>) = match (want_time, want_ensemble) {
        (true, true) => (
            "eps,mse_time,mse_ensemble,se_ensemble",
            estimates
                .iter()
                .map(|e| {
                    vec![e.eps, e.mse_time.unwrap(), e.mse_ensemble.unwrap(), e.se_ensemble.unwrap()]
                })
                .collect(),
        ),
        (true, false) => (
            "eps,mse_time",
            estimates.iter().map(|e| vec![e.eps, e.mse_time.unwrap()]).collect(),
        ),
        _ => (
            "eps,mse_ensemble,se_ensemble",
            estimates
                .iter()
                .map(|e| vec![e.eps, e.mse_ensemble.unwrap(), e.se_ensemble.unwrap()])
                .collect(),
        ),
    };
    let csv = render_csv(&meta, header, rows);
    Ok(SlopeOutcome { estimates, fit_time, fit_ensemble, averaging: spec.averaging, csv })
}
