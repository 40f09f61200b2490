//! Command-line interface.
//!
//! Subcommands: `truth`, `filter-discrete`, `filter-continuous`, `bounds`,
//! `decay`, `slope`, `verify`, `plot`. Exit codes: 0 success, 1 check
//! failure, 2 invalid configuration, 3 numerical divergence.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lorenz_3dvar::bounds::asymptotic_bounds;
use lorenz_3dvar::csv_io::{
    discrete_data_from_csv, read_csv, render_bound_report_csv, render_bound_report_text,
    render_discrete_data, render_errors, render_means, render_trajectory, write_text,
};
use lorenz_3dvar::dynamics::Scheme;
use lorenz_3dvar::error::Error;
use lorenz_3dvar::filter_continuous::{run_continuous, FilterConfigContinuous};
use lorenz_3dvar::filter_discrete::{run_filter, FilterConfigDiscrete};
use lorenz_3dvar::harness::experiments::{generate_truth, initial_mean, run_decay, run_slope};
use lorenz_3dvar::harness::plot::{emit_plot_script, PlotKind};
use lorenz_3dvar::harness::verify::run_verify;
use lorenz_3dvar::harness::{Averaging, ExperimentKind, ExperimentSpec};
use lorenz_3dvar::observation::{observe_discrete, ObsConfig};

#[derive(Parser)]
#[command(
    name = "lorenz-3dvar",
    about = "3DVAR filtering for the partially observed Lorenz '63 system",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every experiment subcommand; unset flags fall back to the
/// config file and then to the documented defaults.
#[derive(Args, Debug, Default)]
struct CommonArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Observation spacing of the discrete filter.
    #[arg(long = "h")]
    h: Option<f64>,
    /// Integration step (truth, forecast, Euler-Maruyama).
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Ensemble size for Monte Carlo estimates.
    #[arg(long)]
    ensemble: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Plain-text config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (meaning depends on the subcommand).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Burn-in fraction of the horizon discarded before averaging.
    #[arg(long)]
    burn_in: Option<f64>,
    /// Comma-separated noise scales for slope experiments.
    #[arg(long)]
    eps_grid: Option<String>,
    /// Averaging mode: time, ensemble, or both.
    #[arg(long)]
    averaging: Option<String>,
    /// Initial error magnitude |m0 - v(0)|.
    #[arg(long)]
    delta0: Option<f64>,
    /// Spin-up length before the experiment window.
    #[arg(long)]
    t_burn: Option<f64>,
    /// Integration scheme: euler or rk4.
    #[arg(long)]
    scheme: Option<String>,
    /// Worker threads for ensemble fan-out (0 = rayon default).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl CommonArgs {
    fn build_spec(&self, kind: ExperimentKind) -> Result<ExperimentSpec, Error> {
        let mut spec = match &self.config {
            Some(path) => ExperimentSpec::parse(&std::fs::read_to_string(path)?)?,
            None => ExperimentSpec::default(),
        };
        spec.kind = kind;
        if let Some(v) = self.alpha {
            spec.alpha = v;
        }
        if let Some(v) = self.b {
            spec.b = v;
        }
        if let Some(v) = self.r {
            spec.r = v;
        }
        if let Some(v) = self.eta {
            spec.eta = Some(v);
        }
        if let Some(v) = self.eps {
            spec.eps = v;
        }
        if let Some(v) = self.h {
            spec.h = v;
        }
        if let Some(v) = self.dt {
            spec.dt = v;
        }
        if let Some(v) = self.horizon {
            spec.horizon = v;
        }
        if let Some(v) = self.ensemble {
            spec.ensemble = v;
        }
        if let Some(v) = self.seed {
            spec.seed = v;
        }
        if let Some(v) = self.burn_in {
            spec.burn_in = v;
        }
        if let Some(grid) = &self.eps_grid {
            let mut parsed = Vec::new();
            for part in grid.split(',') {
                parsed.push(part.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidConfig(format!("bad eps_grid entry `{part}`"))
                })?);
            }
            spec.eps_grid = parsed;
        }
        if let Some(v) = &self.averaging {
            spec.averaging = v.parse::<Averaging>()?;
        }
        if let Some(v) = self.delta0 {
            spec.delta0 = v;
        }
        if let Some(v) = self.t_burn {
            spec.t_burn = v;
        }
        if let Some(v) = &self.scheme {
            spec.scheme = v.parse::<Scheme>()?;
        }
        if let Some(v) = &self.out {
            spec.out = Some(v.clone());
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate an attractor truth trajectory and write it as CSV.
    Truth {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the discrete-time 3DVAR filter once.
    FilterDiscrete {
        #[command(flatten)]
        common: CommonArgs,
        /// Read observations from a `t,y` CSV instead of synthesizing them.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Run the continuous-time 3DVAR filter once.
    FilterContinuous {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print every theoretical constant and bound for a configuration.
    Bounds {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Error-decay experiment (single filter path, summary statistics).
    Decay {
        #[command(flatten)]
        common: CommonArgs,
        /// Data regime: discrete or continuous.
        #[arg(long, default_value = "discrete")]
        regime: String,
        /// Also emit a gnuplot script next to the CSV.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Asymptotic-MSE noise-scaling experiment with log-log fit.
    Slope {
        #[command(flatten)]
        common: CommonArgs,
        /// Data regime: discrete or continuous.
        #[arg(long, default_value = "discrete")]
        regime: String,
        /// Also emit a gnuplot script next to the CSV.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Run every verification suite; nonzero exit if any check fails.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Emit a gnuplot script for an existing CSV.
    Plot {
        /// CSV produced by `decay` or `slope`.
        #[arg(long)]
        csv: PathBuf,
        /// Plot kind: decay or slope.
        #[arg(long)]
        kind: String,
        /// Script output path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn write_or_print(out: &Option<PathBuf>, text: &str, what: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            write_text(path, text)?;
            println!("{what} written to {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn decay_kind(regime: &str) -> Result<ExperimentKind, Error> {
    match regime {
        "discrete" => Ok(ExperimentKind::DecayDiscrete),
        "continuous" => Ok(ExperimentKind::DecayContinuous),
        other => Err(Error::InvalidConfig(format!("unknown regime `{other}`"))),
    }
}

fn slope_kind(regime: &str) -> Result<ExperimentKind, Error> {
    match regime {
        "discrete" => Ok(ExperimentKind::SlopeDiscrete),
        "continuous" => Ok(ExperimentKind::SlopeContinuous),
        other => Err(Error::InvalidConfig(format!("unknown regime `{other}`"))),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("never".to_string(), |x| format!("{x}"))
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Truth { common } => {
            let spec = common.build_spec(ExperimentKind::DecayDiscrete)?;
            let p = spec.params()?;
            let truth = generate_truth(&spec, &p)?;
            let text = render_trajectory(&truth, &spec.meta());
            write_or_print(&spec.out, &text, "truth trajectory")?;
            Ok(true)
        }
        Command::FilterDiscrete { common, data } => {
            let spec = common.build_spec(ExperimentKind::DecayDiscrete)?;
            let p = spec.params()?;
            let truth = generate_truth(&spec, &p)?;
            let eta = spec.effective_eta();
            let cfg = FilterConfigDiscrete {
                scheme: spec.scheme,
                ..FilterConfigDiscrete::new(eta, spec.eps, spec.h, spec.dt)?
            };
            let observations = match &data {
                Some(path) => discrete_data_from_csv(&read_csv(path)?)?,
                None => observe_discrete(&truth, &ObsConfig::new(spec.eps, spec.h, spec.seed)?)?,
            };
            let m0 = initial_mean(truth.state(0), spec.delta0, spec.seed);
            let run = run_filter(&truth, &observations, m0, &cfg, &p)?;
            let meta = spec.meta();
            let prefix = spec.out.clone().unwrap_or_else(|| PathBuf::from("filter_discrete"));
            let means_path = with_suffix(&prefix, "means.csv");
            let errors_path = with_suffix(&prefix, "errors.csv");
            write_text(&means_path, &render_means(&run.times, &run.means, &meta))?;
            write_text(&errors_path, &render_errors(&run.errors, &meta))?;
            if data.is_none() {
                let data_path = with_suffix(&prefix, "data.csv");
                write_text(&data_path, &render_discrete_data(&observations, &meta))?;
            }
            let last = run.errors.last().expect("filter produces records");
            println!(
                "filter-discrete: {} analysis steps, final |delta|^2 = {}, means -> {}, errors -> {}",
                observations.len(),
                last.delta_sq,
                means_path.display(),
                errors_path.display()
            );
            Ok(true)
        }
        Command::FilterContinuous { common } => {
            let spec = common.build_spec(ExperimentKind::DecayContinuous)?;
            let p = spec.params()?;
            let truth = generate_truth(&spec, &p)?;
            let eta = spec.effective_eta();
            let cfg = FilterConfigContinuous::new(eta, spec.eps, spec.dt, spec.seed)?;
            let m0 = initial_mean(truth.state(0), spec.delta0, spec.seed);
            let run = run_continuous(&truth, m0, &cfg, &p)?;
            let meta = spec.meta();
            let prefix = spec.out.clone().unwrap_or_else(|| PathBuf::from("filter_continuous"));
            let means_path = with_suffix(&prefix, "means.csv");
            let errors_path = with_suffix(&prefix, "errors.csv");
            write_text(&means_path, &render_means(&run.times, &run.means, &meta))?;
            write_text(&errors_path, &render_errors(&run.errors, &meta))?;
            let last = run.errors.last().expect("filter produces records");
            println!(
                "filter-continuous: {} steps, final |delta|^2 = {}, means -> {}, errors -> {}",
                run.times.len() - 1,
                last.delta_sq,
                means_path.display(),
                errors_path.display()
            );
            Ok(true)
        }
        Command::Bounds { common } => {
            let spec = common.build_spec(ExperimentKind::Verify)?;
            let p = spec.params()?;
            let report = asymptotic_bounds(spec.effective_eta(), spec.eps, spec.h, &p)?;
            print!("{}", render_bound_report_text(&report));
            if let Some(path) = &spec.out {
                write_text(path, &render_bound_report_csv(&report))?;
                println!("report written to {}", path.display());
            }
            Ok(true)
        }
        Command::Decay { common, regime, plot } => {
            let spec = common.build_spec(decay_kind(&regime)?)?;
            let outcome = run_decay(&spec)?;
            let csv_path = spec.out.clone().unwrap_or_else(|| PathBuf::from("decay.csv"));
            write_text(&csv_path, &outcome.csv)?;
            println!(
                "decay ({regime}): time-to-threshold = {}, post-transient mean |delta| = {}, \
                 fraction below 3 eps = {:.4}, envelope monotone = {}, records -> {}",
                fmt_opt(outcome.time_to_threshold),
                outcome.post_transient_mean_error,
                outcome.post_transient_fraction_below,
                outcome.envelope_monotone,
                csv_path.display()
            );
            if let Some(script_path) = plot {
                let script = emit_plot_script(&csv_path, PlotKind::Decay)?;
                write_text(&script_path, &script)?;
                println!("plot script -> {}", script_path.display());
            }
            Ok(true)
        }
        Command::Slope { common, regime, plot } => {
            let spec = common.build_spec(slope_kind(&regime)?)?;
            let outcome = run_slope(&spec, common.threads)?;
            let csv_path = spec.out.clone().unwrap_or_else(|| PathBuf::from("slope.csv"));
            write_text(&csv_path, &outcome.csv)?;
            for est in &outcome.estimates {
                println!(
                    "eps = {:10}: mse_time = {}, mse_ensemble = {}",
                    est.eps,
                    est.mse_time.map_or("-".into(), |v| format!("{v}")),
                    est.mse_ensemble.map_or("-".into(), |v| format!("{v}")),
                );
            }
            if let Some(fit) = &outcome.fit_time {
                println!("time-averaged fit: slope = {:.4}, intercept = {:.4}", fit.slope, fit.intercept);
            }
            if let Some(fit) = &outcome.fit_ensemble {
                println!("ensemble-averaged fit: slope = {:.4}, intercept = {:.4}", fit.slope, fit.intercept);
            }
            println!("records -> {}", csv_path.display());
            if let Some(script_path) = plot {
                let script = emit_plot_script(&csv_path, PlotKind::Slope)?;
                write_text(&script_path, &script)?;
                println!("plot script -> {}", script_path.display());
            }
            Ok(true)
        }
        Command::Verify { common } => {
            let spec = common.build_spec(ExperimentKind::Verify)?;
            let report = run_verify(&spec, common.threads)?;
            print!("{}", report.render_text());
            if let Some(path) = &spec.out {
                write_text(path, &report.render_csv())?;
                println!("report written to {}", path.display());
            }
            Ok(report.all_passed())
        }
        Command::Plot { csv, kind, out } => {
            let script = emit_plot_script(&csv, kind.parse()?)?;
            write_text(&out, &script)?;
            println!("plot script -> {}", out.display());
            Ok(true)
        }
    }
}

/// `prefix` -> `prefix_means.csv` style sibling paths.
fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push("_");
    name.push(suffix);
    prefix.with_file_name(name)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
