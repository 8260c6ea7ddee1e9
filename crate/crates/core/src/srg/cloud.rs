use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sampler::{adapted_directions, DirectionSet, SamplerConfig};
use crate::error::Result;
use crate::linalg::CMatrix;

type C = Complex64;

/// Output norms below this are treated as an exact zero.
pub const ZERO_OUTPUT: f64 = 1e-14;

/// Provenance of a cloud point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    Random,
    Grid,
    Singvec,
    Eigvec,
    Support,
    Conj,
}

impl fmt::Display for SampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SampleKind::Random => "random",
            SampleKind::Grid => "grid",
            SampleKind::Singvec => "singvec",
            SampleKind::Eigvec => "eigvec",
            SampleKind::Support => "support",
            SampleKind::Conj => "conj",
        };
        f.write_str(s)
    }
}

/// Sampled SRG of one matrix at one frequency.
///
/// Points are stored in pairs: the sampled point with nonnegative imaginary
/// part followed by its conjugate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrgCloud {
    pub omega: f64,
    pub points: Vec<C>,
    pub kinds: Vec<SampleKind>,
    /// Number of sampled directions (before conjugation).
    pub n_samples: usize,
    pub closed_under_conjugation: bool,
}

impl SrgCloud {
    /// Cloud from raw points, conjugate-closed by appending `z*` after each `z`.
    pub fn from_points(omega: f64, points: &[C], kind: SampleKind) -> Self {
        let mut out = Self::empty(omega);
        for &z in points {
            out.push(z, kind);
        }
        out
    }

    fn empty(omega: f64) -> Self {
        Self {
            omega,
            points: Vec::new(),
            kinds: Vec::new(),
            n_samples: 0,
            closed_under_conjugation: true,
        }
    }

    fn push(&mut self, z: C, kind: SampleKind) {
        self.points.push(z);
        self.points.push(z.conj());
        self.kinds.push(kind);
        self.kinds.push(SampleKind::Conj);
        self.n_samples += 1;
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sampled points with nonnegative imaginary part (one per direction).
    pub fn upper(&self) -> impl Iterator<Item = C> + '_ {
        self.points.iter().step_by(2).copied()
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn contains_zero(&self, tol: f64) -> bool {
        self.points.iter().any(|z| z.norm() <= tol)
    }

    /// CSV rows `omega,re,im,sample_kind`, without header.
    pub fn write_csv_rows<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for (z, k) in self.points.iter().zip(&self.kinds) {
            writeln!(w, "{},{},{},{}", fmt_f64(self.omega), z.re, z.im, k)?;
        }
        Ok(())
    }

    pub const CSV_HEADER: &'static str = "omega,re,im,sample_kind";
}

/// Shortest round-trip text, with `inf` for infinity.
pub(crate) fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

/// SRG point of a unit direction: `Re(u^* M u) + j sqrt(|Mu|^2 - Re(u^* M u)^2)`.
#[inline]
pub fn srg_point(mat: &CMatrix, u: &[C]) -> C {
    let m = u.len();
    let mut y2 = 0.0;
    let mut re = 0.0;
    let mut u2 = 0.0;
    for i in 0..m {
        let mut yi = C::new(0.0, 0.0);
        for j in 0..m {
            yi += mat[(i, j)] * u[j];
        }
        y2 += yi.norm_sqr();
        re += u[i].re * yi.re + u[i].im * yi.im;
        u2 += u[i].norm_sqr();
    }
    if u2 != 1.0 {
        y2 /= u2;
        re /= u2;
    }
    if y2.sqrt() < ZERO_OUTPUT {
        return C::new(0.0, 0.0);
    }
    C::new(re, (y2 - re * re).max(0.0).sqrt())
}

/// Reusable sampler bound to one dimension.
#[derive(Debug, Clone)]
pub struct SrgSampler {
    cfg: SamplerConfig,
    base: DirectionSet,
}

impl SrgSampler {
    pub fn new(m: usize, cfg: SamplerConfig) -> Self {
        let base = DirectionSet::new(m, &cfg);
        Self { cfg, base }
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.cfg
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// Sampled SRG of `mat` tagged with frequency `omega`.
    pub fn cloud(&self, mat: &CMatrix, omega: f64) -> Result<SrgCloud> {
        assert_eq!(mat.nrows(), self.base.dim(), "matrix dimension differs from sampler");
        let mut out = SrgCloud::empty(omega);
        if mat.nrows() == 1 {
            // exact: a scalar has the two-point SRG {h, h*}
            let h = mat[(0, 0)];
            out.points = vec![h, h.conj()];
            out.kinds = vec![SampleKind::Eigvec, SampleKind::Conj];
            out.n_samples = 1;
            return Ok(out);
        }
        let extra = adapted_directions(mat, &self.cfg)?;
        out.points.reserve(2 * (self.base.len() + extra.len()));
        for (u, kind) in self.base.iter() {
            out.push(srg_point(mat, u), kind);
        }
        for (u, kind) in &extra {
            out.push(srg_point(mat, u), *kind);
        }
        Ok(out)
    }
}

/// SRG point cloud of `mat` under the given sampler settings.
pub fn srg_points(mat: &CMatrix, cfg: &SamplerConfig) -> Result<SrgCloud> {
    SrgSampler::new(mat.nrows(), cfg.clone()).cloud(mat, 0.0)
}
