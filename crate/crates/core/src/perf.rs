//! Timing of the separation methods against the number of boundary points
//! `N_phi` and the number of frequencies `N_omega`, with log-log exponent fits.

use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratfun::{FrequencyGrid, LtiModel};
use crate::separation::{
    separate, sweep_feedback, FrequencyTester, Method, SeparationQuery, SweepConfig, TauSweep,
};
use crate::srg::{disk_of_points, SamplerConfig, SrgRegion, DISK_INFLATION};

/// What to measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub n_phi: Vec<usize>,
    pub n_omega: Vec<usize>,
    /// Frequencies at which the per-frequency check is timed for the `N_phi` axis.
    pub phi_omegas: Vec<f64>,
    /// Minimum accumulated time per measurement, in seconds.
    pub min_seconds: f64,
    /// Same for one point of the `N_omega` axis.
    pub sweep_min_seconds: f64,
    /// Sampler directions per `N_phi` unit for the `N_phi` axis.
    pub directions_per_bin: usize,
    /// Sweep settings for the `N_omega` axis.
    pub sweep_n_dir: usize,
    pub sweep_phase_bins: usize,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            n_phi: vec![90, 180, 360, 720, 1440],
            n_omega: vec![50, 100, 200, 400],
            phi_omegas: vec![0.1, 1.0, 10.0, 100.0],
            min_seconds: 0.05,
            sweep_min_seconds: 0.5,
            directions_per_bin: 4,
            sweep_n_dir: 400,
            sweep_phase_bins: 180,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    NPhi,
    NOmega,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::NPhi => "n_phi",
            Axis::NOmega => "n_omega",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub method: Method,
    pub axis: Axis,
    pub n: usize,
    /// Mean boundary sizes of the two sides (`N_phi` axis only).
    pub points_a: usize,
    pub points_b: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub method: Method,
    pub axis: Axis,
    pub exponent: f64,
    /// Accepted range, `None` when no claim is checked.
    pub bounds: Option<(f64, f64)>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub rows: Vec<TimingRow>,
    pub fits: Vec<ExponentFit>,
    pub pass: bool,
}

impl ScalingReport {
    pub const CSV_HEADER: &'static str = "method,axis,n,points_a,points_b,seconds";

    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            writeln!(w, "{},{},{},{},{},{:e}", r.method, r.axis, r.n, r.points_a, r.points_b, r.seconds)?;
        }
        Ok(())
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument("exponent fit needs at least two paired samples".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument("exponent fit needs positive samples".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("exponent fit needs distinct x values".into()));
    }
    Ok(sxy / sxx)
}

/// Mean seconds per call: repeats `f` until `min_seconds` have accumulated,
/// three times, and keeps the fastest batch.
pub fn time_per_call(min_seconds: f64, mut f: impl FnMut()) -> f64 {
    f();
    let mut best = f64::INFINITY;
    for _ in 0..3 {
        let start = Instant::now();
        let mut calls = 0u64;
        loop {
            f();
            calls += 1;
            let t = start.elapsed().as_secs_f64();
            if t >= min_seconds {
                best = best.min(t / calls as f64);
                break;
            }
        }
    }
    best
}

/// Per-frequency check time against `N_phi`. Sampling and boundary extraction
/// happen outside the timed region; disks are fitted outside it as well.
pub fn measure_phi<M1: LtiModel, M2: LtiModel>(h1: &M1, h2: &M2, cfg: &ScalingConfig) -> Result<Vec<TimingRow>> {
    let mut rows = Vec::new();
    for &n_phi in &cfg.n_phi {
        let sweep = SweepConfig {
            n_phase_bins: n_phi,
            sampler: SamplerConfig::with_n_dir(cfg.directions_per_bin * n_phi),
            ..SweepConfig::default()
        };
        let tester = FrequencyTester::new(h1.dim(), &sweep);
        let mut sets = Vec::new();
        for &w in &cfg.phi_omegas {
            if let Some(ab) = tester.prepare(&h1.response(w)?, &h2.response(w)?, w)? {
                sets.push((w, ab));
            }
        }
        if sets.is_empty() {
            return Err(Error::InvalidArgument("no bounded frequency to time".into()));
        }
        let points_a = sets.iter().map(|s| s.1 .0.len()).sum::<usize>() / sets.len();
        let points_b = sets.iter().map(|s| s.1 .1.len()).sum::<usize>() / sets.len();
        for method in Method::ALL {
            let queries: Vec<SeparationQuery> = sets
                .iter()
                .map(|(w, (a, b))| {
                    let (region_a, region_b) = match method {
                        Method::Disk => (disk_of_points(a, DISK_INFLATION), disk_of_points(b, DISK_INFLATION)),
                        _ => (SrgRegion::Points { points: a.clone() }, SrgRegion::Points { points: b.clone() }),
                    };
                    SeparationQuery {
                        omega: *w,
                        region_a,
                        region_b,
                        tau: TauSweep::Continuous,
                        method,
                    }
                })
                .collect();
            let seconds = time_per_call(cfg.min_seconds, || {
                for q in &queries {
                    std::hint::black_box(separate(q));
                }
            });
            rows.push(TimingRow {
                method,
                axis: Axis::NPhi,
                n: n_phi,
                points_a,
                points_b,
                seconds,
            });
        }
    }
    Ok(rows)
}

/// Total sweep time against `N_omega`, without refinement or extra samples.
pub fn measure_omega<M1: LtiModel, M2: LtiModel>(h1: &M1, h2: &M2, cfg: &ScalingConfig) -> Result<Vec<TimingRow>> {
    let mut rows = Vec::new();
    for method in Method::ALL {
        let sweep = SweepConfig {
            method,
            sampler: SamplerConfig::with_n_dir(cfg.sweep_n_dir),
            n_phase_bins: cfg.sweep_phase_bins,
            refine_minima: 0,
            include_zero: false,
            include_infinity: false,
            ..SweepConfig::default()
        };
        for &n in &cfg.n_omega {
            let grid = FrequencyGrid::log_count(1e-3, 1e3, n)?;
            let mut err = None;
            let seconds = time_per_call(cfg.sweep_min_seconds, || {
                if let Err(e) = sweep_feedback(h1, h2, &grid, &sweep) {
                    err.get_or_insert(e);
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            rows.push(TimingRow {
                method,
                axis: Axis::NOmega,
                n,
                points_a: 0,
                points_b: 0,
                seconds,
            });
        }
    }
    Ok(rows)
}

/// Accepted exponent range per method and axis.
pub fn exponent_bounds(method: Method, axis: Axis) -> Option<(f64, f64)> {
    match (method, axis) {
        (Method::Naive, Axis::NPhi) => Some((1.7, 2.3)),
        (Method::Hull, Axis::NPhi) => Some((f64::NEG_INFINITY, 1.3)),
        (Method::Disk, Axis::NPhi) => None,
        (_, Axis::NOmega) => Some((0.8, 1.2)),
    }
}

/// Exponent fits of the rows, one per method and axis present.
pub fn fit_rows(rows: &[TimingRow]) -> Result<Vec<ExponentFit>> {
    let mut fits = Vec::new();
    for axis in [Axis::NPhi, Axis::NOmega] {
        for method in Method::ALL {
            let sel: Vec<&TimingRow> = rows.iter().filter(|r| r.axis == axis && r.method == method).collect();
            if sel.len() < 2 {
                continue;
            }
            let xs: Vec<f64> = sel.iter().map(|r| r.n as f64).collect();
            let ys: Vec<f64> = sel.iter().map(|r| r.seconds).collect();
            let exponent = fit_exponent(&xs, &ys)?;
            let bounds = exponent_bounds(method, axis);
            let pass = bounds.is_none_or(|(lo, hi)| exponent >= lo && exponent <= hi);
            fits.push(ExponentFit {
                method,
                axis,
                exponent,
                bounds,
                pass,
            });
        }
    }
    Ok(fits)
}

/// Both axes, timed on a single worker so exponents reflect work rather than scheduling.
pub fn scaling_report<M1: LtiModel, M2: LtiModel>(h1: &M1, h2: &M2, cfg: &ScalingConfig) -> Result<ScalingReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rows = pool.install(|| measure_phi(h1, h2, cfg))?;
    rows.extend(pool.install(|| measure_omega(h1, h2, cfg))?);
    let fits = fit_rows(&rows)?;
    let pass = fits.iter().all(|f| f.pass);
    Ok(ScalingReport { rows, fits, pass })
}
