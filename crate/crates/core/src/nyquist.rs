//! Classical comparators: the determinant locus `det(I + tau H1 H2)(j omega)`,
//! its winding number about the origin, the generalized Nyquist criterion and
//! its sufficient `tau`-form.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::ratfun::{FrequencyGrid, GridScale, LtiModel};
use crate::separation::{check_hypotheses, TauSweep};
use crate::serde_util::f64_inf;

type C = Complex64;

/// Settings shared by the Nyquist-type tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NyquistConfig {
    /// `|det|` at or below this counts as passing through the origin.
    pub epsilon_origin: f64,
    pub epsilon_stab: f64,
    /// `tau` values for the gridded sufficient test.
    pub tau: TauSweep,
    /// Also minimize over `tau` exactly through the eigenvalues of `H1 H2`.
    pub exact_tau: bool,
    /// Sub-intervals inserted where the phase step is too large before the single retry.
    pub refine_factor: usize,
}

impl Default for NyquistConfig {
    fn default() -> Self {
        Self {
            epsilon_origin: 1e-9,
            epsilon_stab: 0.0,
            tau: TauSweep::log_grid(32, 1e-3).expect("valid default tau grid"),
            exact_tau: true,
            refine_factor: 32,
        }
    }
}

/// `det(I + tau H1 H2)` over `omega` in `(-inf, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetLocus {
    pub tau: f64,
    /// `(omega, value)` ordered by `omega`, negative frequencies by conjugation.
    pub samples: Vec<(f64, C)>,
    pub min_abs: f64,
    /// `det(I + tau D1 D2)`, where the contour closes.
    pub limit: C,
}

impl DetLocus {
    /// Contour `[limit, samples..., limit]`.
    pub fn contour(&self) -> Vec<C> {
        let mut out = Vec::with_capacity(self.samples.len() + 2);
        out.push(self.limit);
        out.extend(self.samples.iter().map(|s| s.1));
        out.push(self.limit);
        out
    }

    /// Rows `tau,omega,re,im`, without header.
    pub fn write_csv_rows<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for (omega, z) in &self.samples {
            writeln!(w, "{},{},{},{}", self.tau, omega, z.re, z.im)?;
        }
        Ok(())
    }

    pub const CSV_HEADER: &'static str = "tau,omega,re,im";
}

/// `det(I + tau M1 M2)`.
pub fn loop_det(m1: &CMatrix, m2: &CMatrix, tau: f64) -> C {
    let n = m1.nrows();
    linalg::det(&(CMatrix::identity(n, n) + m1 * m2 * C::new(tau, 0.0)))
}

fn positive_omegas(grid: &FrequencyGrid) -> Vec<f64> {
    let mut w = grid.omegas().to_vec();
    if w[0] > 0.0 {
        w.insert(0, 0.0);
    }
    w
}

fn locus_on<M1: LtiModel, M2: LtiModel>(h1: &M1, h2: &M2, tau: f64, omegas: &[f64]) -> Result<DetLocus> {
    let pos: Vec<(f64, C)> = omegas
        .par_iter()
        .map(|&w| Ok((w, loop_det(&h1.response(w)?, &h2.response(w)?, tau))))
        .collect::<Result<_>>()?;
    let mut samples: Vec<(f64, C)> = pos.iter().rev().filter(|s| s.0 > 0.0).map(|&(w, z)| (-w, z.conj())).collect();
    samples.extend(pos.iter().copied());
    let limit = loop_det(
        &linalg::to_complex(&h1.feedthrough()),
        &linalg::to_complex(&h2.feedthrough()),
        tau,
    );
    let min_abs = samples.iter().map(|s| s.1.norm()).fold(limit.norm(), f64::min);
    Ok(DetLocus {
        tau,
        samples,
        min_abs,
        limit,
    })
}

/// Determinant locus on the grid, with `omega = 0` added and mirrored to negative frequencies.
pub fn det_locus<M1: LtiModel, M2: LtiModel>(h1: &M1, h2: &M2, tau: f64, grid: &FrequencyGrid) -> Result<DetLocus> {
    if h1.dim() != h2.dim() {
        return Err(Error::Dimension(format!("H1 is {0}x{0} but H2 is {1}x{1}", h1.dim(), h2.dim())));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidArgument(format!("tau = {tau} is outside (0, 1]")));
    }
    locus_on(h1, h2, tau, &positive_omegas(grid))
}

/// Winding number of a closed polyline about the origin.
///
/// Fails if a vertex is within `eps_origin` of the origin, if one step turns by
/// more than `pi/2`, or if the total is more than 0.1 away from an integer.
pub fn winding_of_polyline(points: &[C], eps_origin: f64) -> Result<i64> {
    for z in points {
        if z.norm() <= eps_origin {
            return Err(Error::OriginProximity {
                omega: f64::NAN,
                distance: z.norm(),
            });
        }
    }
    let mut total = 0.0;
    for (k, w) in points.windows(2).enumerate() {
        let step = (w[1] / w[0]).arg();
        if step.abs() > PI / 2.0 {
            return Err(Error::PhaseStep {
                from: k as f64,
                to: (k + 1) as f64,
                step,
            });
        }
        total += step;
    }
    let turns = total / TAU;
    let n = turns.round();
    if (turns - n).abs() >= 0.1 {
        return Err(Error::WindingAccuracy(turns));
    }
    Ok(n as i64)
}

/// Counterclockwise encirclements of the origin by the closed locus.
pub fn winding_number(locus: &DetLocus, eps_origin: f64) -> Result<i64> {
    if locus.min_abs <= eps_origin {
        let (omega, z) = locus
            .samples
            .iter()
            .copied()
            .chain(std::iter::once((f64::INFINITY, locus.limit)))
            .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap();
        return Err(Error::OriginProximity {
            omega,
            distance: z.norm(),
        });
    }
    let contour = locus.contour();
    winding_of_polyline(&contour, eps_origin).map_err(|e| match e {
        Error::PhaseStep { from, to, step } => {
            let omega_at = |k: f64| {
                let k = k as usize;
                if k == 0 || k > locus.samples.len() {
                    f64::INFINITY
                } else {
                    locus.samples[k - 1].0
                }
            };
            Error::PhaseStep {
                from: omega_at(from),
                to: omega_at(to),
                step,
            }
        }
        other => other,
    })
}

/// Outcome of the generalized Nyquist criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GncVerdict {
    pub stable: bool,
    pub winding: Option<i64>,
    pub min_abs: f64,
    #[serde(with = "f64_inf")]
    pub worst_omega: f64,
    /// Frequencies actually used after refinement.
    pub n_samples: usize,
}

/// Inserts `factor - 1` points into every positive interval whose endpoints'
/// phase differs by more than `pi/4`.
fn refine_omegas(omegas: &[f64], values: &[C], factor: usize, scale: GridScale) -> Vec<f64> {
    let mut out = vec![omegas[0]];
    for k in 1..omegas.len() {
        let (a, b) = (omegas[k - 1], omegas[k]);
        if (values[k] / values[k - 1]).arg().abs() > PI / 4.0 {
            for i in 1..factor {
                let t = i as f64 / factor as f64;
                let w = if scale == GridScale::Log && a > 0.0 {
                    (a.ln() + t * (b.ln() - a.ln())).exp()
                } else {
                    a + t * (b - a)
                };
                out.push(w);
            }
        }
        out.push(b);
    }
    out
}

/// Generalized Nyquist criterion at `tau = 1`: stable iff the locus stays
/// away from the origin and does not encircle it. Phase steps above `pi/2`
/// trigger one local refinement before failing.
pub fn gnc<M1: LtiModel, M2: LtiModel>(h1: &M1, h2: &M2, grid: &FrequencyGrid, cfg: &NyquistConfig) -> Result<GncVerdict> {
    check_hypotheses(h1, h2, cfg.epsilon_stab)?;
    let mut omegas = positive_omegas(grid);
    let mut locus = locus_on(h1, h2, 1.0, &omegas)?;
    let worst = |l: &DetLocus| {
        l.samples
            .iter()
            .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|s| s.0.abs())
            .unwrap_or(f64::NAN)
    };
    if locus.min_abs <= cfg.epsilon_origin {
        return Ok(GncVerdict {
            stable: false,
            winding: None,
            min_abs: locus.min_abs,
            worst_omega: worst(&locus),
            n_samples: omegas.len(),
        });
    }
    let winding = match winding_number(&locus, cfg.epsilon_origin) {
        Err(Error::PhaseStep { .. }) => {
            let n_pos = omegas.len();
            let values: Vec<C> = locus.samples[locus.samples.len() - n_pos..].iter().map(|s| s.1).collect();
            omegas = refine_omegas(&omegas, &values, cfg.refine_factor.max(2), grid.scale());
            locus = locus_on(h1, h2, 1.0, &omegas)?;
            if locus.min_abs <= cfg.epsilon_origin {
                return Ok(GncVerdict {
                    stable: false,
                    winding: None,
                    min_abs: locus.min_abs,
                    worst_omega: worst(&locus),
                    n_samples: omegas.len(),
                });
            }
            winding_number(&locus, cfg.epsilon_origin)?
        }
        other => other?,
    };
    Ok(GncVerdict {
        stable: winding == 0,
        winding: Some(winding),
        min_abs: locus.min_abs,
        worst_omega: worst(&locus),
        n_samples: omegas.len(),
    })
}

/// Outcome of the sufficient (`tau`-swept) Nyquist test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficientGncReport {
    /// `det(I + tau H1 H2)` stays away from zero for all tested `tau`, `omega`.
    pub pass: bool,
    pub min_abs: f64,
    #[serde(with = "f64_inf")]
    pub worst_omega: f64,
    pub worst_tau: f64,
    /// A located zero `(omega, tau)`: an eigenvalue of `H1 H2` crossing the real axis left of `-1`.
    pub crossing: Option<(f64, f64)>,
}

/// `min over tau` of `|prod_i (1 + tau lambda_i)|` from the per-factor minimizers and the grid.
fn min_over_tau(lambdas: &[C], taus: &[f64], exact: bool) -> (f64, f64) {
    let eval = |t: f64| lambdas.iter().map(|l| C::new(1.0, 0.0) + l * t).product::<C>().norm();
    let mut best = (f64::INFINITY, 1.0);
    let mut consider = |t: f64| {
        let v = eval(t);
        if v < best.0 {
            best = (v, t);
        }
    };
    for &t in taus {
        consider(t);
    }
    if exact {
        for l in lambdas {
            let n2 = l.norm_sqr();
            if n2 > 0.0 {
                let t = (-l.re / n2).clamp(0.0, 1.0);
                if t > 0.0 {
                    consider(t);
                }
            }
        }
    }
    best
}

/// Pairs eigenvalues of consecutive frequencies by minimal total displacement.
fn match_branches(prev: &[C], next: &[C]) -> Vec<usize> {
    let n = prev.len();
    if n <= 5 {
        let mut idx: Vec<usize> = (0..n).collect();
        let mut best = (f64::INFINITY, idx.clone());
        permute(&mut idx, 0, &mut |p| {
            let cost: f64 = (0..n).map(|i| (prev[i] - next[p[i]]).norm()).sum();
            if cost < best.0 {
                best = (cost, p.to_vec());
            }
        });
        best.1
    } else {
        let mut used = vec![false; n];
        (0..n)
            .map(|i| {
                let j = (0..n)
                    .filter(|&j| !used[j])
                    .min_by(|&a, &b| (prev[i] - next[a]).norm().total_cmp(&(prev[i] - next[b]).norm()))
                    .unwrap();
                used[j] = true;
                j
            })
            .collect()
    }
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

/// Sufficient GNC: `det(I + tau H1 H2) != 0` for every `tau` in `(0, 1]` and
/// every frequency. The `tau` grid is always evaluated; with `exact_tau`,
/// per-frequency minimizers over `tau` are added and eigenvalue branches of
/// `H1 H2` are tracked between grid points, bisecting wherever one crosses
/// the real axis at or left of `-1`.
pub fn sufficient_gnc<M1: LtiModel, M2: LtiModel>(
    h1: &M1,
    h2: &M2,
    grid: &FrequencyGrid,
    cfg: &NyquistConfig,
) -> Result<SufficientGncReport> {
    check_hypotheses(h1, h2, cfg.epsilon_stab)?;
    cfg.tau.validate()?;
    let taus: Vec<f64> = match &cfg.tau {
        TauSweep::Grid(t) => t.clone(),
        TauSweep::Continuous => vec![1.0],
    };
    let exact = cfg.exact_tau || cfg.tau == TauSweep::Continuous;
    let omegas = positive_omegas(grid);
    let loops: Vec<CMatrix> = omegas
        .par_iter()
        .map(|&w| Ok(h1.response(w)? * h2.response(w)?))
        .collect::<Result<_>>()?;
    let d_loop = linalg::to_complex(&(h1.feedthrough() * h2.feedthrough()));
    let mut eigs: Vec<Vec<C>> = loops.par_iter().map(linalg::eigenvalues).collect::<Result<_>>()?;
    eigs.push(linalg::eigenvalues(&d_loop)?);

    let mut report = SufficientGncReport {
        pass: true,
        min_abs: f64::INFINITY,
        worst_omega: f64::NAN,
        worst_tau: f64::NAN,
        crossing: None,
    };
    let all_omegas: Vec<f64> = omegas.iter().copied().chain(std::iter::once(f64::INFINITY)).collect();
    for (k, lambdas) in eigs.iter().enumerate() {
        let (v, t) = min_over_tau(lambdas, &taus, exact);
        if v < report.min_abs {
            report.min_abs = v;
            report.worst_omega = all_omegas[k];
            report.worst_tau = t;
        }
    }

    if exact {
        let eval_eigs = |w: f64| -> Result<Vec<C>> { linalg::eigenvalues(&(h1.response(w)? * h2.response(w)?)) };
        for k in 1..omegas.len() {
            let perm = match_branches(&eigs[k - 1], &eigs[k]);
            for (i, &j) in perm.iter().enumerate() {
                let (a, b) = (eigs[k - 1][i], eigs[k][j]);
                if a.im * b.im >= 0.0 || a.im == b.im {
                    continue;
                }
                let re_cross = a.re + (b.re - a.re) * a.im / (a.im - b.im);
                if re_cross > -0.9 {
                    continue;
                }
                if let Some((w, lam)) = bisect_crossing(&eval_eigs, omegas[k - 1], omegas[k], a)? {
                    if lam.re <= -1.0 {
                        let tau = (-1.0 / lam.re).clamp(0.0, 1.0);
                        let l = h1.response(w)? * h2.response(w)?;
                        let v = loop_det(&l, &CMatrix::identity(l.nrows(), l.nrows()), tau).norm();
                        if v < report.min_abs {
                            report.min_abs = v;
                            report.worst_omega = w;
                            report.worst_tau = tau;
                        }
                        report.crossing.get_or_insert((w, tau));
                    }
                }
            }
        }
    }
    report.pass = report.min_abs > cfg.epsilon_origin && report.crossing.is_none();
    Ok(report)
}

/// Follows the branch starting at `start` from `lo` to `hi` and bisects the
/// sign change of its imaginary part. Returns the crossing frequency and eigenvalue.
fn bisect_crossing(
    eval: &dyn Fn(f64) -> Result<Vec<C>>,
    lo: f64,
    hi: f64,
    start: C,
) -> Result<Option<(f64, C)>> {
    let follow = |lams: &[C], near: C| -> C {
        *lams
            .iter()
            .min_by(|a, b| (*a - near).norm().total_cmp(&(*b - near).norm()))
            .unwrap()
    };
    let (mut a, mut b) = (lo, hi);
    let mut la = start;
    let mut lb = follow(&eval(hi)?, start);
    if la.im * lb.im > 0.0 {
        return Ok(None);
    }
    for _ in 0..60 {
        let mid = if a > 0.0 { (a * b).sqrt() } else { 0.5 * (a + b) };
        if mid <= a || mid >= b {
            break;
        }
        let lm = follow(&eval(mid)?, la);
        if lm.im == 0.0 {
            return Ok(Some((mid, lm)));
        }
        if la.im * lm.im < 0.0 {
            b = mid;
            lb = lm;
        } else {
            a = mid;
            la = lm;
        }
    }
    let lam = if la.im.abs() < lb.im.abs() { la } else { lb };
    let w = if la.im.abs() < lb.im.abs() { a } else { b };
    Ok(Some((w, C::new(lam.re, 0.0))))
}

/// Feedthrough product `D1 D2`, the loop at `omega = inf`.
pub fn loop_feedthrough<M1: LtiModel, M2: LtiModel>(h1: &M1, h2: &M2) -> DMatrix<f64> {
    h1.feedthrough() * h2.feedthrough()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::{parse_rational_matrix, RationalMatrix};

    fn tf(text: &str) -> RationalMatrix {
        parse_rational_matrix(text).unwrap()
    }

    fn circle(center: C, radius: f64, turns: i32, n: usize) -> Vec<C> {
        (0..=n)
            .map(|k| center + C::from_polar(radius, TAU * turns as f64 * k as f64 / n as f64))
            .collect()
    }

    #[test]
    fn circles() {
        assert_eq!(winding_of_polyline(&circle(C::new(2.0, 0.0), 1.0, 1, 64), 1e-9).unwrap(), 0);
        assert_eq!(winding_of_polyline(&circle(C::new(0.0, 0.0), 1.0, 1, 64), 1e-9).unwrap(), 1);
        assert_eq!(winding_of_polyline(&circle(C::new(0.0, 0.0), 1.0, -2, 64), 1e-9).unwrap(), -2);
    }

    #[test]
    fn coarse_polyline_is_rejected() {
        let square = [C::new(1.0, 0.0), C::new(-1.0, 0.1), C::new(1.0, 0.0)];
        assert!(matches!(winding_of_polyline(&square, 1e-9), Err(Error::PhaseStep { .. })));
    }

    #[test]
    fn constant_loci() {
        let grid = FrequencyGrid::log(1e-2, 1e2, 5).unwrap();
        let z = RationalMatrix::constant(&DMatrix::zeros(2, 2)).unwrap();
        let l = det_locus(&z, &z, 1.0, &grid).unwrap();
        assert!(l.samples.iter().all(|s| s.1 == C::new(1.0, 0.0)));
        assert_eq!(l.min_abs, 1.0);
        let one = tf("[ 1 ]");
        let l = det_locus(&one, &one, 1.0, &grid).unwrap();
        assert!(l.samples.iter().all(|s| (s.1 - C::new(2.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn locus_is_conjugate_symmetric() {
        let grid = FrequencyGrid::log(1e-2, 1e2, 10).unwrap();
        let l = det_locus(&tf("[ 2/(s+1) ]"), &tf("[ 1/(s+3) ]"), 0.7, &grid).unwrap();
        let n = l.samples.len();
        for k in 0..n / 2 {
            let (w1, z1) = l.samples[k];
            let (w2, z2) = l.samples[n - 1 - k];
            assert_eq!(w1, -w2);
            assert!((z1 - z2.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn first_order_loop_is_stable() {
        let grid = FrequencyGrid::log(1e-3, 1e3, 50).unwrap();
        let v = gnc(&tf("[ 2/(s+1) ]"), &tf("[ 1 ]"), &grid, &NyquistConfig::default()).unwrap();
        assert!(v.stable);
        assert_eq!(v.winding, Some(0));
        let s = sufficient_gnc(&tf("[ 2/(s+1) ]"), &tf("[ 1 ]"), &grid, &NyquistConfig::default()).unwrap();
        assert!(s.pass);
    }

    #[test]
    fn third_order_high_gain_encircles() {
        // (s+1)^3 + 10 has right half-plane roots
        let grid = FrequencyGrid::log(1e-3, 1e3, 50).unwrap();
        let v = gnc(&tf("[ 10/(s+1)^3 ]"), &tf("[ 1 ]"), &grid, &NyquistConfig::default()).unwrap();
        assert!(!v.stable);
        assert_ne!(v.winding, Some(0));
        let s = sufficient_gnc(&tf("[ 10/(s+1)^3 ]"), &tf("[ 1 ]"), &grid, &NyquistConfig::default()).unwrap();
        assert!(!s.pass);
        let (w, tau) = s.crossing.unwrap();
        // phase crossover of 1/(s+1)^3 is at omega = sqrt(3), gain 1/8
        assert!((w - 3f64.sqrt()).abs() < 1e-6, "w = {w}");
        assert!((tau - 0.8).abs() < 1e-6, "tau = {tau}");
    }

    #[test]
    fn zero_loop_passes() {
        let grid = FrequencyGrid::log(1e-2, 1e2, 5).unwrap();
        let z = RationalMatrix::constant(&DMatrix::zeros(2, 2)).unwrap();
        assert!(sufficient_gnc(&z, &z, &grid, &NyquistConfig::default()).unwrap().pass);
    }

    #[test]
    fn branch_matching_follows_nearest() {
        let prev = [C::new(0.0, 1.0), C::new(5.0, 0.0)];
        let next = [C::new(5.1, 0.0), C::new(0.1, 1.0)];
        assert_eq!(match_branches(&prev, &next), vec![1, 0]);
    }
}
