use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::methods::{golden_min, separate, Method, SeparationQuery, TauSweep};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::ratfun::{FrequencyGrid, LtiModel};
use crate::serde_util::f64_inf;
use crate::srg::{densify_chords, fmt_f64, invert_point, phase_boundary, SamplerConfig, SrgRegion, SrgSampler, ZERO_OUTPUT};

type C = Complex64;

/// Which system's SRG is replaced by its chord closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChordSide {
    H1,
    H2,
}

impl fmt::Display for ChordSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChordSide::H1 => "h1",
            ChordSide::H2 => "h2",
        })
    }
}

impl FromStr for ChordSide {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h1" => Ok(ChordSide::H1),
            "h2" => Ok(ChordSide::H2),
            _ => Err(Error::InvalidArgument(format!("unknown chord side {s:?}"))),
        }
    }
}

/// Settings of a frequency sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub method: Method,
    pub chord_side: ChordSide,
    pub sampler: SamplerConfig,
    /// Phase bins of the boundary extraction.
    pub n_phase_bins: usize,
    /// Points per chord when densifying the chord side (odd, so the real point is included).
    pub chord_points: usize,
    pub tau: TauSweep,
    pub epsilon_margin: f64,
    pub epsilon_stab: f64,
    /// Distance below which a point counts as `0` before inversion.
    pub tol_zero: f64,
    /// Number of smallest local margin minima refined by golden-section search in `log omega`.
    pub refine_minima: usize,
    /// Margin evaluations per refined minimum.
    pub refine_evals: usize,
    /// Also check `omega = 0` when the grid starts above it.
    pub include_zero: bool,
    /// Also check the feedthrough matrices as an `omega = inf` sample.
    pub include_infinity: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            method: Method::Hull,
            chord_side: ChordSide::H1,
            sampler: SamplerConfig::default(),
            n_phase_bins: 720,
            chord_points: 9,
            tau: TauSweep::Continuous,
            epsilon_margin: 1e-6,
            epsilon_stab: 0.0,
            tol_zero: 1e-9,
            refine_minima: 8,
            refine_evals: 24,
            include_zero: true,
            include_infinity: true,
        }
    }
}

/// Per-frequency separation outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyResult {
    #[serde(with = "f64_inf")]
    pub omega: f64,
    #[serde(with = "f64_inf")]
    pub margin: f64,
    pub separated: bool,
    pub method: Method,
    pub worst_tau: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<(C, C)>,
    /// `0` lies in the (chord-closed) SRG of the inverted system.
    #[serde(default)]
    pub unbounded: bool,
}

/// Overall outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    CertifiedStable,
    Violated,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::CertifiedStable => "certified_stable",
            Status::Violated => "violated",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// Result of `sweep_feedback`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackVerdict {
    pub status: Status,
    #[serde(with = "f64_inf")]
    pub worst_omega: f64,
    pub worst_tau: f64,
    #[serde(with = "f64_inf")]
    pub margin_min: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<(C, C)>,
    pub per_frequency: Vec<FrequencyResult>,
    pub config_echo: serde_json::Value,
}

impl FeedbackVerdict {
    pub fn is_certified(&self) -> bool {
        self.status == Status::CertifiedStable
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV `omega,margin,worst_tau`, one row per frequency.
    pub fn write_margin_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "omega,margin,worst_tau")?;
        for r in &self.per_frequency {
            writeln!(w, "{},{},{}", fmt_f64(r.omega), fmt_f64(r.margin), r.worst_tau)?;
        }
        Ok(())
    }
}

/// Samplers and settings shared by all frequencies of one sweep.
pub struct FrequencyTester<'a> {
    cfg: &'a SweepConfig,
    sampler: SrgSampler,
}

impl<'a> FrequencyTester<'a> {
    pub fn new(m: usize, cfg: &'a SweepConfig) -> Self {
        Self {
            cfg,
            sampler: SrgSampler::new(m, cfg.sampler.clone()),
        }
    }

    /// Point sets `(A, B)` for the query at one frequency: `A` is the inverted
    /// SRG of `m1`, `B` the SRG of `m2`, with the chord side densified.
    /// Returns `None` when `A` is unbounded.
    pub fn prepare(&self, m1: &CMatrix, m2: &CMatrix, omega: f64) -> Result<Option<(Vec<C>, Vec<C>)>> {
        let cfg = self.cfg;
        let nb = cfg.n_phase_bins;
        let c1 = self.sampler.cloud(m1, omega)?;
        let c2 = self.sampler.cloud(m2, omega)?;
        let mut a = phase_boundary(&c1.points, nb);
        let mut b = phase_boundary(&c2.points, nb);
        match cfg.chord_side {
            ChordSide::H1 => {
                // the SRG is connected, so real parts of both signs put a chord through 0
                let lo = c1.points.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
                let hi = c1.points.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
                if lo <= cfg.tol_zero && hi >= -cfg.tol_zero {
                    return Ok(None);
                }
                a = densify_chords(&a, cfg.chord_points);
            }
            ChordSide::H2 => b = phase_boundary(&densify_chords(&b, cfg.chord_points), nb),
        }
        if a.iter().any(|z| z.norm() <= cfg.tol_zero) {
            return Ok(None);
        }
        let a_inv: Vec<C> = a.into_iter().map(invert_point).collect();
        Ok(Some((phase_boundary(&a_inv, nb), b)))
    }

    /// Separation test at one frequency.
    pub fn test(&self, m1: &CMatrix, m2: &CMatrix, omega: f64) -> Result<FrequencyResult> {
        let method = self.cfg.method;
        if m1.iter().all(|z| z.norm() < ZERO_OUTPUT) {
            // zero loop gain: det(I + tau H1 H2) = 1
            return Ok(FrequencyResult {
                omega,
                margin: f64::INFINITY,
                separated: true,
                method,
                worst_tau: 1.0,
                witness: None,
                unbounded: false,
            });
        }
        let Some((a, b)) = self.prepare(m1, m2, omega)? else {
            return Ok(FrequencyResult {
                omega,
                margin: 0.0,
                separated: false,
                method,
                worst_tau: 1.0,
                witness: None,
                unbounded: true,
            });
        };
        let q = SeparationQuery {
            omega,
            region_a: SrgRegion::Points { points: a },
            region_b: SrgRegion::Points { points: b },
            tau: self.cfg.tau.clone(),
            method,
        };
        let r = separate(&q);
        Ok(FrequencyResult {
            omega,
            margin: r.margin,
            separated: r.separated,
            method,
            worst_tau: r.worst_tau,
            witness: r.witness,
            unbounded: false,
        })
    }
}

/// Open-loop and well-posedness checks shared by all frequency-domain tests.
pub fn check_hypotheses<M1: LtiModel, M2: LtiModel>(h1: &M1, h2: &M2, eps_stab: f64) -> Result<()> {
    if h1.dim() != h2.dim() {
        return Err(Error::Dimension(format!(
            "H1 is {0}x{0} but H2 is {1}x{1}",
            h1.dim(),
            h2.dim()
        )));
    }
    for (which, ss) in [("H1", h1.state_space()), ("H2", h2.state_space())] {
        let rep = ss.is_hurwitz(eps_stab)?;
        if !rep.hurwitz {
            return Err(Error::OpenLoopUnstable {
                which,
                abscissa: rep.abscissa,
            });
        }
    }
    let m = h1.dim();
    let loop_d = DMatrix::<f64>::identity(m, m) + h1.feedthrough() * h2.feedthrough();
    let d = linalg::det(&linalg::to_complex(&loop_d)).norm();
    if d < 1e-12 {
        return Err(Error::IllPosed(d));
    }
    Ok(())
}

/// SRG separation sweep over the grid, refined around the smallest margin
/// minima, plus the feedthrough sample at `omega = inf`.
pub fn sweep_feedback<M1: LtiModel, M2: LtiModel>(
    h1: &M1,
    h2: &M2,
    grid: &FrequencyGrid,
    cfg: &SweepConfig,
) -> Result<FeedbackVerdict> {
    cfg.tau.validate()?;
    if cfg.n_phase_bins == 0 || cfg.chord_points < 2 {
        return Err(Error::InvalidArgument("phase bins and chord points must be positive".into()));
    }
    check_hypotheses(h1, h2, cfg.epsilon_stab)?;
    let tester = FrequencyTester::new(h1.dim(), cfg);
    let eval = |w: f64| -> Result<FrequencyResult> { tester.test(&h1.response(w)?, &h2.response(w)?, w) };

    let mut omegas = grid.omegas().to_vec();
    if cfg.include_zero && omegas[0] > 0.0 {
        omegas.insert(0, 0.0);
    }
    let mut results: Vec<FrequencyResult> = omegas.par_iter().map(|&w| eval(w)).collect::<Result<_>>()?;

    if cfg.refine_minima > 0 && results.len() >= 3 {
        let positive: Vec<FrequencyResult> = results.iter().filter(|r| r.omega > 0.0).copied().collect();
        let refined = refine_minima(&positive, cfg, &eval)?;
        results.extend(refined);
        results.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    }
    if cfg.include_infinity {
        let d1 = linalg::to_complex(&h1.feedthrough());
        let d2 = linalg::to_complex(&h2.feedthrough());
        results.push(tester.test(&d1, &d2, f64::INFINITY)?);
    }
    Ok(reduce_verdict(results, cfg))
}

/// Golden-section refinement in `log omega` around the smallest interior local minima.
fn refine_minima(
    results: &[FrequencyResult],
    cfg: &SweepConfig,
    eval: &(dyn Fn(f64) -> Result<FrequencyResult> + Sync),
) -> Result<Vec<FrequencyResult>> {
    let n = results.len();
    let mut minima: Vec<usize> = (0..n)
        .filter(|&i| {
            let m = results[i].margin;
            m > 0.0
                && m.is_finite()
                && (i == 0 || m <= results[i - 1].margin)
                && (i + 1 == n || m <= results[i + 1].margin)
        })
        .collect();
    minima.sort_by(|&i, &j| results[i].margin.total_cmp(&results[j].margin));
    minima.truncate(cfg.refine_minima);
    let iters = cfg.refine_evals.saturating_sub(4);
    let found: Vec<Vec<FrequencyResult>> = minima
        .par_iter()
        .map(|&i| {
            let lo = results[i.saturating_sub(1)].omega.ln();
            let hi = results[(i + 1).min(n - 1)].omega.ln();
            let seen = std::sync::Mutex::new(Vec::new());
            let err = std::sync::Mutex::new(None);
            golden_min(
                |x| match eval(x.exp()) {
                    Ok(r) => {
                        let m = r.margin;
                        seen.lock().unwrap().push(r);
                        m
                    }
                    Err(e) => {
                        *err.lock().unwrap() = Some(e);
                        f64::INFINITY
                    }
                },
                lo,
                hi,
                iters,
            );
            match err.into_inner().unwrap() {
                Some(e) => Err(e),
                None => Ok(seen.into_inner().unwrap()),
            }
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Ordered, deterministic reduction of per-frequency results into a verdict.
pub fn reduce_verdict(per_frequency: Vec<FrequencyResult>, cfg: &SweepConfig) -> FeedbackVerdict {
    let worst = per_frequency
        .iter()
        .min_by(|a, b| {
            // unbounded samples rank after genuine contacts of equal margin
            a.margin.total_cmp(&b.margin).then(a.unbounded.cmp(&b.unbounded))
        })
        .copied();
    let overlap = per_frequency.iter().any(|r| !r.unbounded && r.margin == 0.0);
    let doubtful = per_frequency.iter().any(|r| r.unbounded || r.margin <= cfg.epsilon_margin);
    let status = if overlap {
        Status::Violated
    } else if doubtful || per_frequency.is_empty() {
        Status::Inconclusive
    } else {
        Status::CertifiedStable
    };
    let (worst_omega, worst_tau, margin_min, witness) = match worst {
        Some(w) => (w.omega, w.worst_tau, w.margin, w.witness),
        None => (f64::NAN, f64::NAN, f64::NAN, None),
    };
    FeedbackVerdict {
        status,
        worst_omega,
        worst_tau,
        margin_min,
        witness,
        per_frequency,
        config_echo: serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null),
    }
}
