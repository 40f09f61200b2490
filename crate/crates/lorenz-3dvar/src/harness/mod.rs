//! Experiment orchestration: configuration, figure-reproduction runs,
//! verification suites, and plot-script emission.

pub mod experiments;
pub mod plot;
pub mod verify;

use std::path::PathBuf;
use std::str::FromStr;

use crate::dynamics::{LorenzParams, Scheme};
use crate::error::{Error, Result};

/// What an experiment run does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    DecayDiscrete,
    DecayContinuous,
    SlopeDiscrete,
    SlopeContinuous,
    Verify,
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ExperimentKind::DecayDiscrete => "decay_discrete",
            ExperimentKind::DecayContinuous => "decay_continuous",
            ExperimentKind::SlopeDiscrete => "slope_discrete",
            ExperimentKind::SlopeContinuous => "slope_continuous",
            ExperimentKind::Verify => "verify",
        };
        write!(f, "{s}")
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decay_discrete" => Ok(ExperimentKind::DecayDiscrete),
            "decay_continuous" => Ok(ExperimentKind::DecayContinuous),
            "slope_discrete" => Ok(ExperimentKind::SlopeDiscrete),
            "slope_continuous" => Ok(ExperimentKind::SlopeContinuous),
            "verify" => Ok(ExperimentKind::Verify),
            other => Err(Error::InvalidConfig(format!("unknown experiment kind `{other}`"))),
        }
    }
}

/// How asymptotic mean-square errors are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Averaging {
    /// Time average over the post-burn-in tail of one long run.
    Time,
    /// Ensemble average over noise realizations at the final record time.
    Ensemble,
    #[default]
    Both,
}

impl std::fmt::Display for Averaging {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Averaging::Time => "time",
            Averaging::Ensemble => "ensemble",
            Averaging::Both => "both",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Averaging {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time" => Ok(Averaging::Time),
            "ensemble" => Ok(Averaging::Ensemble),
            "both" => Ok(Averaging::Both),
            other => Err(Error::InvalidConfig(format!("unknown averaging mode `{other}`"))),
        }
    }
}

/// Full description of one experiment. Every field has a documented default;
/// plain-text configs override fields via `key = value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub alpha: f64,
    pub b: f64,
    pub r: f64,
    /// Inflation ratio. `None` keeps the per-experiment default: 0.1 for
    /// decay/slope runs, and the per-check canonical values inside `verify`.
    pub eta: Option<f64>,
    pub eps: f64,
    /// Observation spacing of the discrete filter.
    pub h: f64,
    /// Integration step (truth, forecast model, and Euler-Maruyama).
    pub dt: f64,
    /// Experiment horizon in time units.
    pub horizon: f64,
    /// Fraction of the horizon discarded before asymptotic averaging.
    pub burn_in: f64,
    pub eps_grid: Vec<f64>,
    /// Number of noise realizations for ensemble estimates.
    pub ensemble: usize,
    pub averaging: Averaging,
    pub seed: u64,
    /// Magnitude of the initial mean perturbation |m_0 - v(0)|.
    pub delta0: f64,
    /// Spin-up length used to land the truth on the attractor.
    pub t_burn: f64,
    /// Truth/forecast integration scheme.
    pub scheme: Scheme,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            kind: ExperimentKind::DecayDiscrete,
            alpha: 10.0,
            b: 8.0 / 3.0,
            r: 28.0,
            eta: None,
            eps: 0.01,
            h: 0.01,
            dt: 1e-4,
            horizon: 100.0,
            burn_in: 0.5,
            eps_grid: vec![1e-3, 1e-2, 1e-1, 1.0],
            ensemble: 1000,
            averaging: Averaging::Both,
            seed: 42,
            delta0: 10.0,
            t_burn: 50.0,
            scheme: Scheme::ExplicitEuler,
            out: None,
        }
    }
}

/// Default inflation ratio for decay and slope experiments.
pub const DEFAULT_ETA: f64 = 0.1;

impl ExperimentSpec {
    pub fn params(&self) -> Result<LorenzParams> {
        LorenzParams::new(self.alpha, self.b, self.r)
    }

    /// The inflation ratio a decay/slope run uses.
    pub fn effective_eta(&self) -> f64 {
        self.eta.unwrap_or(DEFAULT_ETA)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidConfig(format!("eps must be >= 0, got {}", self.eps)));
        }
        if let Some(eta) = self.eta {
            if !(eta > 0.0) {
                return Err(Error::InvalidConfig(format!("eta must be positive, got {eta}")));
            }
        }
        for v in [("h", self.h), ("dt", self.dt), ("horizon", self.horizon)] {
            if !(v.1 > 0.0) {
                return Err(Error::InvalidConfig(format!("{} must be positive, got {}", v.0, v.1)));
            }
        }
        if !(0.0..1.0).contains(&self.burn_in) {
            return Err(Error::InvalidConfig(format!(
                "burn_in must lie in [0, 1), got {}",
                self.burn_in
            )));
        }
        if self.eps_grid.is_empty() || self.eps_grid.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::InvalidConfig(
                "eps_grid must be nonempty with strictly positive entries".to_string(),
            ));
        }
        if matches!(self.kind, ExperimentKind::SlopeDiscrete | ExperimentKind::SlopeContinuous)
            && self.eps_grid.len() < 4
        {
            return Err(Error::InvalidConfig(format!(
                "slope fits need at least 4 eps values, got {}",
                self.eps_grid.len()
            )));
        }
        if self.ensemble == 0 {
            return Err(Error::InvalidConfig("ensemble size must be positive".to_string()));
        }
        if !(self.delta0 >= 0.0) {
            return Err(Error::InvalidConfig(format!("delta0 must be >= 0, got {}", self.delta0)));
        }
        if !(self.t_burn >= 0.0) {
            return Err(Error::InvalidConfig(format!("t_burn must be >= 0, got {}", self.t_burn)));
        }
        Ok(())
    }

    /// Render as `key = value` lines; [`ExperimentSpec::parse`] inverts this.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        push("kind", self.kind.to_string());
        push("alpha", format!("{}", self.alpha));
        push("b", format!("{}", self.b));
        push("r", format!("{}", self.r));
        if let Some(eta) = self.eta {
            push("eta", format!("{eta}"));
        }
        push("eps", format!("{}", self.eps));
        push("h", format!("{}", self.h));
        push("dt", format!("{}", self.dt));
        push("horizon", format!("{}", self.horizon));
        push("burn_in", format!("{}", self.burn_in));
        push(
            "eps_grid",
            self.eps_grid.iter().map(|e| format!("{e}")).collect::<Vec<_>>().join(","),
        );
        push("ensemble", format!("{}", self.ensemble));
        push("averaging", self.averaging.to_string());
        push("seed", format!("{}", self.seed));
        push("delta0", format!("{}", self.delta0));
        push("t_burn", format!("{}", self.t_burn));
        push("scheme", self.scheme.to_string());
        if let Some(out_path) = &self.out {
            push("out", out_path.display().to_string());
        }
        out
    }

    /// Metadata pairs recorded in every output header. The output path is
    /// omitted: a file should not describe its own location, and including
    /// it would break byte-comparisons between runs writing elsewhere.
    pub fn meta(&self) -> Vec<(String, String)> {
        self.render()
            .lines()
            .filter_map(|l| l.split_once(" = "))
            .filter(|(k, _)| *k != "out")
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    /// Parse `key = value` lines with `#` comments; unknown keys are errors,
    /// all keys optional.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = ExperimentSpec::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| {
                Error::InvalidConfig(format!("line {}: bad {what} `{value}`", lineno + 1))
            };
            match key {
                "kind" => spec.kind = value.parse()?,
                "alpha" => spec.alpha = value.parse().map_err(|_| bad("alpha"))?,
                "b" => spec.b = value.parse().map_err(|_| bad("b"))?,
                "r" => spec.r = value.parse().map_err(|_| bad("r"))?,
                "eta" => spec.eta = Some(value.parse().map_err(|_| bad("eta"))?),
                "eps" => spec.eps = value.parse().map_err(|_| bad("eps"))?,
                "h" => spec.h = value.parse().map_err(|_| bad("h"))?,
                "dt" => spec.dt = value.parse().map_err(|_| bad("dt"))?,
                "horizon" => spec.horizon = value.parse().map_err(|_| bad("horizon"))?,
                "burn_in" => spec.burn_in = value.parse().map_err(|_| bad("burn_in"))?,
                "eps_grid" => {
                    let mut grid = Vec::new();
                    for part in value.split(',') {
                        grid.push(part.trim().parse().map_err(|_| bad("eps_grid entry"))?);
                    }
                    spec.eps_grid = grid;
                }
                "ensemble" => spec.ensemble = value.parse().map_err(|_| bad("ensemble"))?,
                "averaging" => spec.averaging = value.parse()?,
                "seed" => spec.seed = value.parse().map_err(|_| bad("seed"))?,
                "delta0" => spec.delta0 = value.parse().map_err(|_| bad("delta0"))?,
                "t_burn" => spec.t_burn = value.parse().map_err(|_| bad("t_burn"))?,
                "scheme" => spec.scheme = value.parse()?,
                "out" => spec.out = Some(PathBuf::from(value)),
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}
