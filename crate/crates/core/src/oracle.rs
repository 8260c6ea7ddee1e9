//! Ground truth by closed-loop eigenvalues, a seeded ensemble of random
//! stable systems, and the experiments that compare the frequency-domain
//! tests against it.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::nyquist::{sufficient_gnc, NyquistConfig};
use crate::ratfun::{FrequencyGrid, LtiModel, StateSpaceModel};
use crate::separation::{sweep_feedback, ChordSide, Method, Status, SweepConfig};
use crate::serde_util::f64_inf;
use crate::srg::SamplerConfig;

/// `|det(I + D2 D1)|` below this is ill-posed.
pub const WELL_POSED_TOLERANCE: f64 = 1e-12;

/// Relative mismatch allowed by the closed-loop self-check.
pub const SELF_CHECK_TOLERANCE: f64 = 1e-7;

/// Realization of `y = H1 (u - H2 y)` from input `u` to output `y`.
pub fn closed_loop(m1: &StateSpaceModel, m2: &StateSpaceModel) -> Result<StateSpaceModel> {
    let m = m1.dim();
    if m2.dim() != m {
        return Err(Error::Dimension(format!("H1 is {m}x{m} but H2 is {0}x{0}", m2.dim())));
    }
    let (n1, n2) = (m1.order(), m2.order());
    let eye = DMatrix::<f64>::identity(m, m);
    let well = &eye + &m2.d * &m1.d;
    let det = well.determinant();
    if det.abs() < WELL_POSED_TOLERANCE {
        return Err(Error::IllPosed(det.abs()));
    }
    // W = (I + D1 D2)^-1, y = W (C1 x1 - D1 C2 x2 + D1 u)
    let w = (&eye + &m1.d * &m2.d)
        .try_inverse()
        .ok_or(Error::IllPosed(det.abs()))?;
    let wc1 = &w * &m1.c;
    let wd1c2 = &w * &m1.d * &m2.c;
    let wd1 = &w * &m1.d;
    // e = u - C2 x2 - D2 y
    let e_x1 = -(&m2.d * &wc1);
    let e_x2 = -&m2.c + &m2.d * &wd1c2;
    let e_u = &eye - &m2.d * &wd1;

    let n = n1 + n2;
    let mut a = DMatrix::zeros(n, n);
    a.view_mut((0, 0), (n1, n1)).copy_from(&(&m1.a + &m1.b * &e_x1));
    a.view_mut((0, n1), (n1, n2)).copy_from(&(&m1.b * &e_x2));
    a.view_mut((n1, 0), (n2, n1)).copy_from(&(&m2.b * &wc1));
    a.view_mut((n1, n1), (n2, n2)).copy_from(&(&m2.a - &m2.b * &wd1c2));
    let mut b = DMatrix::zeros(n, m);
    b.view_mut((0, 0), (n1, m)).copy_from(&(&m1.b * &e_u));
    b.view_mut((n1, 0), (n2, m)).copy_from(&(&m2.b * &wd1));
    let mut c = DMatrix::zeros(m, n);
    c.view_mut((0, 0), (m, n1)).copy_from(&wc1);
    c.view_mut((0, n1), (m, n2)).copy_from(&(-&wd1c2));
    let cl = StateSpaceModel::new(a, b, c, wd1)?;
    self_check(m1, m2, &cl)?;
    Ok(cl)
}

/// Compares the realization against `H1 (I + H2 H1)^-1` at ten frequencies.
fn self_check(m1: &StateSpaceModel, m2: &StateSpaceModel, cl: &StateSpaceModel) -> Result<()> {
    let m = m1.dim();
    let eye = CMatrix::identity(m, m);
    for k in 0..10 {
        let omega = 10f64.powf(-2.0 + 4.0 * k as f64 / 9.0) * 1.0137;
        let h1 = m1.response(omega)?;
        let h2 = m2.response(omega)?;
        let Some(inv) = (&eye + &h2 * &h1).try_inverse() else {
            // closed-loop pole on the axis; the direct formula is undefined here
            continue;
        };
        let direct = &h1 * inv;
        let realized = match cl.response(omega) {
            Ok(r) => r,
            Err(Error::PoleOnAxis { .. }) => continue,
            Err(e) => return Err(e),
        };
        let diff = linalg::rel_diff(&realized, &direct);
        if !(diff <= SELF_CHECK_TOLERANCE) {
            return Err(Error::InvalidArgument(format!(
                "closed-loop realization mismatch {diff:e} at omega = {omega}"
            )));
        }
    }
    Ok(())
}

/// Closed-loop stability by eigenvalues of the interconnected state matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub stable: bool,
    /// Spectral abscissa of the closed loop, `-inf` for a static loop.
    #[serde(with = "f64_inf")]
    pub abscissa: f64,
}

pub fn is_closed_loop_stable(m1: &StateSpaceModel, m2: &StateSpaceModel) -> Result<OracleVerdict> {
    let cl = closed_loop(m1, m2)?;
    let abscissa = if cl.order() == 0 {
        f64::NEG_INFINITY
    } else {
        linalg::spectral_abscissa(&cl.a)?
    };
    Ok(OracleVerdict {
        stable: abscissa < 0.0,
        abscissa,
    })
}

/// Seeded family of random stable pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub seed: u64,
    pub count: usize,
    pub m: usize,
    pub min_order: usize,
    pub max_order: usize,
    /// Every open-loop eigenvalue has real part at most `-spectral_margin`.
    pub spectral_margin: f64,
}

impl Ensemble {
    pub fn new(seed: u64, count: usize, m: usize, max_order: usize) -> Self {
        Self {
            seed,
            count,
            m,
            min_order: 1,
            max_order,
            spectral_margin: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.min_order == 0 || self.min_order > self.max_order {
            return Err(Error::InvalidArgument(format!(
                "ensemble needs m >= 1 and 1 <= min_order <= max_order, got m = {}, orders {}..={}",
                self.m, self.min_order, self.max_order
            )));
        }
        if !(self.spectral_margin > 0.0) {
            return Err(Error::InvalidArgument("spectral_margin must be positive".into()));
        }
        Ok(())
    }

    /// The `index`-th pair, independent of every other index.
    pub fn pair(&self, index: usize) -> (StateSpaceModel, StateSpaceModel) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let n1 = rng.random_range(self.min_order..=self.max_order);
        let n2 = rng.random_range(self.min_order..=self.max_order);
        let h1 = random_stable(&mut rng, self.m, n1, self.spectral_margin);
        let h2 = random_stable(&mut rng, self.m, n2, self.spectral_margin);
        (h1, h2)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (StateSpaceModel, StateSpaceModel)> + '_ {
        (0..self.count).map(|i| self.pair(i))
    }
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// `A = Q L Q^T + S` with `L` diagonal left of `-margin` and `S` skew, so the
/// symmetric part of `A` bounds every eigenvalue's real part by `-margin`.
/// `B`, `C` Gaussian with a random overall gain normalized by `sqrt(order)`,
/// `D` Gaussian scaled by 0.1.
pub fn random_stable(rng: &mut ChaCha8Rng, m: usize, order: usize, margin: f64) -> StateSpaceModel {
    let q = gaussian(rng, order, order).qr().q();
    let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(order, |_, _| {
        -margin - 2.0 * rng.random::<f64>()
    }));
    let g = gaussian(rng, order, order);
    let skew = (&g - g.transpose()) * rng.random_range(0.0..2.0);
    let a = &q * lambda * q.transpose() + skew;
    let b = gaussian(rng, order, m);
    let gain = 10f64.powf(rng.random_range(-1.0..1.0)) / (order as f64).sqrt();
    let c = gaussian(rng, m, order) * gain;
    let d = gaussian(rng, m, m) * 0.1;
    StateSpaceModel::new(a, b, c, d).expect("consistent random dimensions")
}

/// Settings of the comparison experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub grid: FrequencyGrid,
    pub sweep: SweepConfig,
    pub nyquist: NyquistConfig,
    /// Cases with `|det|` or SRG margin below this are not counted either way.
    pub dead_band: f64,
    /// Pairs with `sigma_min(H1(j omega))` at or below this on the grid are skipped.
    pub invertibility: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            grid: FrequencyGrid::log(1e-3, 1e3, 100).expect("valid default grid"),
            sweep: SweepConfig {
                method: Method::Naive,
                chord_side: ChordSide::H2,
                ..SweepConfig::default()
            },
            nyquist: NyquistConfig::default(),
            dead_band: 1e-4,
            invertibility: 1e-9,
        }
    }
}

impl ExperimentConfig {
    /// Coarser resolution for runs over many pairs: 20 points per decade,
    /// 400 directions and 180 phase bins.
    pub fn screening() -> Self {
        let base = Self::default();
        Self {
            grid: FrequencyGrid::log(1e-3, 1e3, 20).expect("valid screening grid"),
            sweep: SweepConfig {
                sampler: SamplerConfig::with_n_dir(400),
                n_phase_bins: 180,
                ..base.sweep
            },
            ..base
        }
    }
}

/// Classification of one pair in the equivalence experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Agree,
    Disagree,
    DeadBand,
    SkippedNoninvertible,
}

/// Every number computed for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub index: usize,
    pub order1: usize,
    pub order2: usize,
    pub oracle_stable: bool,
    #[serde(with = "f64_inf")]
    pub oracle_abscissa: f64,
    pub min_singular_h1: f64,
    pub gnc_pass: Option<bool>,
    #[serde(with = "f64_inf")]
    pub gnc_min_abs: f64,
    pub srg_status: Option<Status>,
    #[serde(with = "f64_inf")]
    pub srg_margin: f64,
    #[serde(with = "f64_inf")]
    pub srg_worst_omega: f64,
    pub class: Agreement,
}

impl PairRecord {
    pub const CSV_HEADER: &'static str =
        "index,order1,order2,oracle_stable,oracle_abscissa,min_singular_h1,gnc_pass,gnc_min_abs,srg_status,srg_margin,srg_worst_omega,class";

    fn csv_row(&self) -> String {
        use crate::srg::fmt_f64;
        let opt = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.index,
            self.order1,
            self.order2,
            self.oracle_stable,
            fmt_f64(self.oracle_abscissa),
            fmt_f64(self.min_singular_h1),
            opt(self.gnc_pass),
            fmt_f64(self.gnc_min_abs),
            self.srg_status.map(|s| s.to_string()).unwrap_or_default(),
            fmt_f64(self.srg_margin),
            fmt_f64(self.srg_worst_omega),
            serde_json::to_value(self.class).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        )
    }
}

/// Aggregate of the equivalence experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub seed: u64,
    pub count: usize,
    pub agree: usize,
    pub disagree: usize,
    pub dead_band: usize,
    pub skipped_noninvertible: usize,
    /// Certified by SRG but unstable according to the oracle.
    pub unsound: usize,
    /// Disagreements and dead-band cases, by increasing index.
    pub worst_cases: Vec<PairRecord>,
    #[serde(skip)]
    pub records: Vec<PairRecord>,
}

impl EquivalenceReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{}", PairRecord::CSV_HEADER)?;
        for r in &self.records {
            writeln!(w, "{}", r.csv_row())?;
        }
        Ok(())
    }
}

fn min_singular_on_grid(h1: &StateSpaceModel, grid: &FrequencyGrid) -> Result<f64> {
    let mut omegas = vec![0.0];
    omegas.extend_from_slice(grid.omegas());
    let mut worst = f64::INFINITY;
    for w in omegas {
        worst = worst.min(linalg::min_singular_value(&h1.response(w)?)?);
    }
    Ok(worst)
}

fn run_pair(index: usize, h1: &StateSpaceModel, h2: &StateSpaceModel, cfg: &ExperimentConfig, compare: bool) -> Result<PairRecord> {
    let oracle = is_closed_loop_stable(h1, h2)?;
    let mut rec = PairRecord {
        index,
        order1: h1.order(),
        order2: h2.order(),
        oracle_stable: oracle.stable,
        oracle_abscissa: oracle.abscissa,
        min_singular_h1: f64::NAN,
        gnc_pass: None,
        gnc_min_abs: f64::NAN,
        srg_status: None,
        srg_margin: f64::NAN,
        srg_worst_omega: f64::NAN,
        class: Agreement::Agree,
    };
    if compare {
        rec.min_singular_h1 = min_singular_on_grid(h1, &cfg.grid)?;
        if !(rec.min_singular_h1 > cfg.invertibility) {
            rec.class = Agreement::SkippedNoninvertible;
            return Ok(rec);
        }
        let gnc = sufficient_gnc(h1, h2, &cfg.grid, &cfg.nyquist)?;
        rec.gnc_pass = Some(gnc.pass);
        rec.gnc_min_abs = gnc.min_abs;
    }
    let srg = sweep_feedback(h1, h2, &cfg.grid, &cfg.sweep)?;
    rec.srg_status = Some(srg.status);
    rec.srg_margin = srg.margin_min;
    rec.srg_worst_omega = srg.worst_omega;
    if compare {
        let srg_pass = srg.status == Status::CertifiedStable;
        // a margin of exactly 0 is an overlap or an unbounded inverse, not a thin call
        let thin = rec.gnc_min_abs <= cfg.nyquist.epsilon_origin + cfg.dead_band
            || (srg.margin_min > 0.0 && srg.margin_min <= cfg.sweep.epsilon_margin + cfg.dead_band);
        rec.class = if Some(srg_pass) == rec.gnc_pass {
            Agreement::Agree
        } else if thin {
            Agreement::DeadBand
        } else {
            Agreement::Disagree
        };
    }
    Ok(rec)
}

fn collect_report(gen: &Ensemble, records: Vec<PairRecord>) -> EquivalenceReport {
    let count_of = |c: Agreement| records.iter().filter(|r| r.class == c).count();
    let unsound = records
        .iter()
        .filter(|r| r.srg_status == Some(Status::CertifiedStable) && !r.oracle_stable)
        .count();
    EquivalenceReport {
        seed: gen.seed,
        count: records.len(),
        agree: count_of(Agreement::Agree),
        disagree: count_of(Agreement::Disagree),
        dead_band: count_of(Agreement::DeadBand),
        skipped_noninvertible: count_of(Agreement::SkippedNoninvertible),
        unsound,
        worst_cases: records
            .iter()
            .filter(|r| matches!(r.class, Agreement::Disagree | Agreement::DeadBand))
            .cloned()
            .collect(),
        records,
    }
}

/// Compares the sufficient Nyquist test with the SRG sweep on every pair of the ensemble.
pub fn equivalence_experiment(gen: &Ensemble, cfg: &ExperimentConfig) -> Result<EquivalenceReport> {
    if gen.count == 0 {
        return Ok(collect_report(gen, Vec::new()));
    }
    gen.validate()?;
    let records = (0..gen.count)
        .into_par_iter()
        .map(|i| {
            let (h1, h2) = gen.pair(i);
            run_pair(i, &h1, &h2, cfg, true)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect_report(gen, records))
}

/// Aggregate of the soundness experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundnessReport {
    pub seed: u64,
    pub count: usize,
    pub certified: usize,
    pub oracle_stable: usize,
    /// Certified although the oracle finds the loop unstable.
    pub violations: usize,
    /// Oracle-stable loops the SRG test did not certify.
    pub missed: usize,
    pub violating_indices: Vec<usize>,
    #[serde(skip)]
    pub records: Vec<PairRecord>,
}

/// Runs the SRG sweep and the eigenvalue oracle on every pair of the ensemble.
pub fn soundness_experiment(gen: &Ensemble, cfg: &ExperimentConfig) -> Result<SoundnessReport> {
    if gen.count > 0 {
        gen.validate()?;
    }
    let records = (0..gen.count)
        .into_par_iter()
        .map(|i| {
            let (h1, h2) = gen.pair(i);
            run_pair(i, &h1, &h2, cfg, false)
        })
        .collect::<Result<Vec<_>>>()?;
    let certified = |r: &PairRecord| r.srg_status == Some(Status::CertifiedStable);
    let violating_indices: Vec<usize> = records
        .iter()
        .filter(|r| certified(r) && !r.oracle_stable)
        .map(|r| r.index)
        .collect();
    Ok(SoundnessReport {
        seed: gen.seed,
        count: records.len(),
        certified: records.iter().filter(|r| certified(r)).count(),
        oracle_stable: records.iter().filter(|r| r.oracle_stable).count(),
        violations: violating_indices.len(),
        missed: records.iter().filter(|r| r.oracle_stable && !certified(r)).count(),
        violating_indices,
        records,
    })
}

/// Closed-loop poles, for reports.
pub fn closed_loop_poles(m1: &StateSpaceModel, m2: &StateSpaceModel) -> Result<Vec<Complex64>> {
    let cl = closed_loop(m1, m2)?;
    if cl.order() == 0 {
        return Ok(Vec::new());
    }
    linalg::real_eigenvalues(&cl.a)
}

/// `H(j omega)` of any model through its realization, used to cross-check transfer-matrix models.
pub fn realization_response<M: LtiModel>(model: &M, omega: f64) -> Result<CMatrix> {
    model.state_space().response(omega)
}
