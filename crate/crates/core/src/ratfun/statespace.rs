use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::RationalMatrix;
use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Realization `x' = Ax + Bu, y = Cx + Du` of a square system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSpaceModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

/// Result of an open-loop pole check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurwitzReport {
    pub hurwitz: bool,
    /// Largest real part of the eigenvalues of `A` (`-inf` when there are no states).
    pub abscissa: f64,
}

impl StateSpaceModel {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        let m = d.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension(format!("A is {}x{}", n, a.ncols())));
        }
        if d.ncols() != m {
            return Err(Error::Dimension(format!("D is {}x{}, expected square", m, d.ncols())));
        }
        if b.nrows() != n || b.ncols() != m {
            return Err(Error::Dimension(format!(
                "B is {}x{}, expected {n}x{m}",
                b.nrows(),
                b.ncols()
            )));
        }
        if c.nrows() != m || c.ncols() != n {
            return Err(Error::Dimension(format!(
                "C is {}x{}, expected {m}x{n}",
                c.nrows(),
                c.ncols()
            )));
        }
        Ok(Self { a, b, c, d })
    }

    /// Pure gain `y = K u` with no states.
    pub fn gain(k: DMatrix<f64>) -> Result<Self> {
        let m = k.nrows();
        Self::new(
            DMatrix::zeros(0, 0),
            DMatrix::zeros(0, m),
            DMatrix::zeros(m, 0),
            k,
        )
    }

    pub fn dim(&self) -> usize {
        self.d.nrows()
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// `D + C (j omega I - A)^{-1} B`.
    pub fn response(&self, omega: f64) -> Result<CMatrix> {
        self.response_at(Complex64::new(0.0, omega))
    }

    pub fn response_at(&self, s: Complex64) -> Result<CMatrix> {
        let n = self.order();
        let d = linalg::to_complex(&self.d);
        if n == 0 {
            return Ok(d);
        }
        let resolvent = CMatrix::identity(n, n) * s - linalg::to_complex(&self.a);
        let x = resolvent
            .lu()
            .solve(&linalg::to_complex(&self.b))
            .ok_or(Error::PoleOnAxis {
                row: 0,
                col: 0,
                omega: s.im,
                magnitude: 0.0,
            })?;
        Ok(d + linalg::to_complex(&self.c) * x)
    }

    /// Every eigenvalue of `A` has real part below `-eps_stab`.
    pub fn is_hurwitz(&self, eps_stab: f64) -> Result<HurwitzReport> {
        let abscissa = linalg::spectral_abscissa(&self.a)?;
        Ok(HurwitzReport {
            hurwitz: abscissa < -eps_stab,
            abscissa,
        })
    }
}

/// Per-column controllable canonical realization, stacked block-diagonally.
///
/// Column `j` uses the product of its distinct (coefficient-equal) entry
/// denominators as a common denominator. No minimality reduction is done.
pub fn realize(h: &RationalMatrix) -> StateSpaceModel {
    let m = h.dim();
    let mut blocks: Vec<ColumnBlock> = Vec::with_capacity(m);
    for j in 0..m {
        blocks.push(ColumnBlock::build(h, j));
    }
    let n: usize = blocks.iter().map(|b| b.order()).sum();
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, m);
    let mut c = DMatrix::zeros(m, n);
    let mut d = DMatrix::zeros(m, m);
    let mut offset = 0;
    for (j, blk) in blocks.iter().enumerate() {
        let k = blk.order();
        if k > 0 {
            // companion form: shift structure plus last row of -a_i
            for r in 0..k - 1 {
                a[(offset + r, offset + r + 1)] = 1.0;
            }
            for col in 0..k {
                a[(offset + k - 1, offset + col)] = -blk.den_monic.coeff(col);
            }
            b[(offset + k - 1, j)] = 1.0;
            for i in 0..m {
                for col in 0..k {
                    c[(i, offset + col)] = blk.residues[i].coeff(col);
                }
            }
        }
        for i in 0..m {
            d[(i, j)] = blk.feedthrough[i];
        }
        offset += k;
    }
    StateSpaceModel { a, b, c, d }
}

struct ColumnBlock {
    den_monic: Polynomial,
    residues: Vec<Polynomial>,
    feedthrough: Vec<f64>,
}

impl ColumnBlock {
    fn order(&self) -> usize {
        self.den_monic.degree()
    }

    fn build(h: &RationalMatrix, j: usize) -> Self {
        let m = h.dim();
        let mut distinct: Vec<&Polynomial> = Vec::new();
        for i in 0..m {
            let den = h.entry(i, j).den();
            if !distinct.contains(&den) {
                distinct.push(den);
            }
        }
        let common = distinct.iter().fold(Polynomial::one(), |acc, d| &acc * d);
        let lead = common.leading();
        let den_monic = common.scale(1.0 / lead);
        let order = den_monic.degree();
        let mut residues = Vec::with_capacity(m);
        let mut feedthrough = Vec::with_capacity(m);
        for i in 0..m {
            let e = h.entry(i, j);
            // numerator over the common denominator
            let cofactor = distinct
                .iter()
                .filter(|d| **d != e.den())
                .fold(Polynomial::one(), |acc, d| &acc * d);
            let num = (&e.num * &cofactor).scale(1.0 / lead);
            let dff = num.coeff(order);
            let rem = &num - &den_monic.scale(dff);
            // drop the (now cancelled) s^order term exactly
            let rem = Polynomial::new((0..order).map(|k| rem.coeff(k)).collect());
            residues.push(rem);
            feedthrough.push(dff);
        }
        Self {
            den_monic,
            residues,
            feedthrough,
        }
    }
}
