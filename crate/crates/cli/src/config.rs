//! Run configuration: command-line flags over a TOML file over defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};
use srg_cert::nyquist::NyquistConfig;
use srg_cert::ratfun::FrequencyGrid;
use srg_cert::separation::{ChordSide, Method, SweepConfig, TauSweep};
use srg_cert::srg::SamplerConfig;

/// How the SRG test treats `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TauMode {
    /// Every `tau` in `(0, 1]`.
    Continuous,
    /// `tau_points` log-spaced values in `[1e-3, 1]`.
    Grid,
    /// Only `tau = 1`.
    One,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points_per_decade: usize,
    pub n_dir: usize,
    pub n_phase_bins: usize,
    pub tau_points: usize,
    pub tau_mode: TauMode,
    pub method: Method,
    pub chord_side: ChordSide,
    pub seed: u64,
    pub epsilon_margin: f64,
    pub epsilon_origin: f64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            omega_min: 1e-3,
            omega_max: 1e3,
            points_per_decade: 400,
            n_dir: 2000,
            n_phase_bins: 720,
            tau_points: 32,
            tau_mode: TauMode::Continuous,
            method: Method::Hull,
            chord_side: ChordSide::H1,
            seed: 0,
            epsilon_margin: 1e-6,
            epsilon_origin: 1e-9,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Same fields, all optional: one layer of overrides.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    omega_min: Option<f64>,
    omega_max: Option<f64>,
    points_per_decade: Option<usize>,
    n_dir: Option<usize>,
    n_phase_bins: Option<usize>,
    tau_points: Option<usize>,
    tau_mode: Option<TauMode>,
    method: Option<String>,
    chord_side: Option<String>,
    seed: Option<u64>,
    epsilon_margin: Option<f64>,
    epsilon_origin: Option<f64>,
    output_dir: Option<PathBuf>,
}

/// Flags mirroring the configuration fields.
#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    /// TOML file with `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub omega_min: Option<f64>,
    #[arg(long, global = true)]
    pub omega_max: Option<f64>,
    /// Grid points per decade.
    #[arg(long, global = true)]
    pub ppd: Option<usize>,
    /// Sampled directions per frequency.
    #[arg(long, global = true)]
    pub n_dir: Option<usize>,
    #[arg(long, global = true)]
    pub n_phase_bins: Option<usize>,
    #[arg(long, global = true)]
    pub tau_points: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub tau_mode: Option<TauMode>,
    /// disk, hull, naive or all (check only).
    #[arg(long, global = true)]
    pub method: Option<String>,
    /// h1 or h2.
    #[arg(long, global = true)]
    pub chord_side: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub epsilon_margin: Option<f64>,
    #[arg(long, global = true)]
    pub epsilon_origin: Option<f64>,
    /// Output directory.
    #[arg(long = "out", global = true)]
    pub output_dir: Option<PathBuf>,
}

impl RunFlags {
    fn as_partial(&self) -> PartialConfig {
        PartialConfig {
            omega_min: self.omega_min,
            omega_max: self.omega_max,
            points_per_decade: self.ppd,
            n_dir: self.n_dir,
            n_phase_bins: self.n_phase_bins,
            tau_points: self.tau_points,
            tau_mode: self.tau_mode,
            method: self.method.clone(),
            chord_side: self.chord_side.clone(),
            seed: self.seed,
            epsilon_margin: self.epsilon_margin,
            epsilon_origin: self.epsilon_origin,
            output_dir: self.output_dir.clone(),
        }
    }
}

/// Methods requested on the command line; `all` expands to every method.
pub fn parse_methods(text: &str) -> Result<Vec<Method>> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(Method::ALL.to_vec());
    }
    text.split(',')
        .map(|s| s.trim().parse::<Method>().map_err(anyhow::Error::from))
        .collect()
}

impl RunConfig {
    /// Defaults, then the config file, then the flags. Returns the configuration
    /// and the method list (more than one only for `all` or a comma list).
    pub fn resolve(flags: &RunFlags) -> Result<(Self, Vec<Method>)> {
        Self::resolve_with(RunConfig::default(), flags)
    }

    /// As `resolve`, starting from `base` instead of the defaults.
    pub fn resolve_with(base: RunConfig, flags: &RunFlags) -> Result<(Self, Vec<Method>)> {
        let mut cfg = base;
        let mut methods = vec![cfg.method];
        if let Some(path) = &flags.config {
            let layer = load_file(path)?;
            cfg.apply(&layer, &mut methods)?;
        }
        cfg.apply(&flags.as_partial(), &mut methods)?;
        cfg.validate()?;
        Ok((cfg, methods))
    }

    fn apply(&mut self, p: &PartialConfig, methods: &mut Vec<Method>) -> Result<()> {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = p.$f.clone() { self.$f = v; } )* };
        }
        take!(omega_min, omega_max, points_per_decade, n_dir, n_phase_bins, tau_points, tau_mode, seed, epsilon_margin, epsilon_origin, output_dir);
        if let Some(m) = &p.method {
            *methods = parse_methods(m)?;
            self.method = methods[0];
        }
        if let Some(c) = &p.chord_side {
            self.chord_side = c.parse()?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_min > 0.0 && self.omega_min < self.omega_max && self.omega_max.is_finite()) {
            bail!("need 0 < omega_min < omega_max, got [{}, {}]", self.omega_min, self.omega_max);
        }
        for (name, v) in [
            ("points_per_decade", self.points_per_decade),
            ("n_dir", self.n_dir),
            ("n_phase_bins", self.n_phase_bins),
            ("tau_points", self.tau_points),
        ] {
            if v == 0 {
                bail!("{name} must be at least 1");
            }
        }
        if !(self.epsilon_margin > 0.0 && self.epsilon_origin > 0.0) {
            bail!("epsilon_margin and epsilon_origin must be positive");
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        Ok(FrequencyGrid::log(self.omega_min, self.omega_max, self.points_per_decade)?)
    }

    fn tau_grid(&self) -> TauSweep {
        if self.tau_points == 1 {
            TauSweep::tau_one()
        } else {
            TauSweep::log_grid(self.tau_points, 1e-3).expect("validated tau points")
        }
    }

    pub fn sweep(&self, method: Method) -> SweepConfig {
        SweepConfig {
            method,
            chord_side: self.chord_side,
            sampler: SamplerConfig::with_n_dir(self.n_dir).seed(self.seed),
            n_phase_bins: self.n_phase_bins,
            tau: match self.tau_mode {
                TauMode::Continuous => TauSweep::Continuous,
                TauMode::Grid => self.tau_grid(),
                TauMode::One => TauSweep::tau_one(),
            },
            epsilon_margin: self.epsilon_margin,
            ..SweepConfig::default()
        }
    }

    pub fn nyquist(&self) -> NyquistConfig {
        NyquistConfig {
            epsilon_origin: self.epsilon_origin,
            tau: self.tau_grid(),
            ..NyquistConfig::default()
        }
    }
}

fn load_file(path: &Path) -> Result<PartialConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}
