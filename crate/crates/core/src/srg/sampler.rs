//! Unit directions over complex projective space used to sample the SRG.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::cloud::SampleKind;
use crate::error::Result;
use crate::linalg::{self, CMatrix};

type C = Complex64;

/// How many directions of each kind to draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Low-discrepancy (Halton) directions.
    pub n_grid: usize,
    /// Seeded Gaussian directions.
    pub n_random: usize,
    /// Top eigenvectors of `cos(phi) Herm(M) + sin(phi) M^* M` for evenly spaced `phi`.
    pub n_support: usize,
    pub singular_vectors: bool,
    pub eigenvectors: bool,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self::with_n_dir(2000)
    }
}

impl SamplerConfig {
    /// Half grid, half random, plus the matrix-adapted directions.
    pub fn with_n_dir(n_dir: usize) -> Self {
        Self {
            n_grid: n_dir / 2,
            n_random: n_dir - n_dir / 2,
            n_support: 64,
            singular_vectors: true,
            eigenvectors: true,
            seed: 0,
        }
    }

    /// Grid and random directions only, no matrix-adapted directions.
    pub fn blind(n_dir: usize) -> Self {
        Self {
            n_support: 0,
            singular_vectors: false,
            eigenvectors: false,
            ..Self::with_n_dir(n_dir)
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn n_dir(&self) -> usize {
        self.n_grid + self.n_random
    }
}

/// The matrix-independent part of a sampler: grid and random unit vectors,
/// stored flat with stride `m`. Built once and reused at every frequency.
#[derive(Debug, Clone)]
pub struct DirectionSet {
    m: usize,
    dirs: Vec<C>,
    kinds: Vec<SampleKind>,
}

impl DirectionSet {
    pub fn new(m: usize, cfg: &SamplerConfig) -> Self {
        assert!(m >= 1, "dimension must be positive");
        let mut dirs = Vec::with_capacity(m * cfg.n_dir());
        let mut kinds = Vec::with_capacity(cfg.n_dir());
        if m == 1 {
            return Self { m, dirs, kinds };
        }
        let primes = first_primes(2 * m - 2);
        let mut x = vec![0.0; 2 * m - 2];
        for idx in 1..=cfg.n_grid {
            for (xk, &p) in x.iter_mut().zip(&primes) {
                *xk = radical_inverse(idx as u64, p);
            }
            push_cube_point(m, &x, &mut dirs);
            kinds.push(SampleKind::Grid);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.n_random {
            let mut v: Vec<C> = (0..m)
                .map(|_| C::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                .collect();
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= n);
            dirs.extend(v);
            kinds.push(SampleKind::Random);
        }
        Self { m, dirs, kinds }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[C], SampleKind)> {
        self.dirs.chunks_exact(self.m.max(1)).zip(self.kinds.iter().copied())
    }
}

/// Directions that depend on the matrix: singular vectors, eigenvectors and
/// support directions of the numerical-range-like set behind the SRG.
pub fn adapted_directions(mat: &CMatrix, cfg: &SamplerConfig) -> Result<Vec<(Vec<C>, SampleKind)>> {
    let mut out = Vec::new();
    if cfg.singular_vectors {
        let pairs = linalg::svd(mat)?;
        for col in pairs.v.column_iter() {
            out.push((col.iter().copied().collect(), SampleKind::Singvec));
        }
    }
    if cfg.eigenvectors {
        for v in linalg::eigenvectors(mat)? {
            out.push((v.iter().copied().collect(), SampleKind::Eigvec));
        }
    }
    if cfg.n_support > 0 {
        let herm = (mat + mat.adjoint()) * C::new(0.5, 0.0);
        let gram = mat.adjoint() * mat;
        for k in 0..cfg.n_support {
            let phi = std::f64::consts::TAU * k as f64 / cfg.n_support as f64;
            let h = &herm * C::new(phi.cos(), 0.0) + &gram * C::new(phi.sin(), 0.0);
            let v = linalg::hermitian_top_eigenvector(&h)?;
            out.push((v.iter().copied().collect(), SampleKind::Support));
        }
    }
    Ok(out)
}

/// Maps a point of `[0,1)^(2m-2)` to a unit vector; uniform measure maps to
/// the unitarily invariant measure on projective space.
fn push_cube_point(m: usize, x: &[f64], out: &mut Vec<C>) {
    let mut rem = 1.0;
    let mut w = vec![0.0; m];
    for k in 0..m - 1 {
        let v = 1.0 - (1.0 - x[k]).powf(1.0 / (m - 1 - k) as f64);
        w[k] = rem * v;
        rem -= w[k];
    }
    w[m - 1] = rem.max(0.0);
    out.push(C::new(w[0].sqrt(), 0.0));
    for k in 1..m {
        out.push(C::from_polar(w[k].sqrt(), std::f64::consts::TAU * x[m - 2 + k]));
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

fn first_primes(n: usize) -> Vec<u64> {
    let mut ps: Vec<u64> = Vec::with_capacity(n);
    let mut c = 2u64;
    while ps.len() < n {
        if ps.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
            ps.push(c);
        }
        c += 1;
    }
    ps
}
