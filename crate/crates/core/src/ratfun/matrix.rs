use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::rational::RationalFunction;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Default threshold on `|den(j omega)|` below which an entry is treated as
/// having a pole on the imaginary axis.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Square matrix of proper real-rational functions, the transfer matrix `H(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMatrix {
    dim: usize,
    entries: Vec<RationalFunction>,
}

impl RationalMatrix {
    /// `entries` are row-major and must contain `dim * dim` proper functions.
    pub fn new(dim: usize, entries: Vec<RationalFunction>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("transfer matrix must be at least 1x1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "{} entries given for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        for (k, e) in entries.iter().enumerate() {
            let (row, col) = (k / dim, k % dim);
            if e.den.is_zero() {
                return Err(Error::ZeroDenominator { row, col });
            }
            if !e.num.is_zero() && e.num.degree() > e.den.degree() {
                return Err(Error::Improper {
                    row,
                    col,
                    text: e.to_string(),
                    num_degree: e.num.degree(),
                    den_degree: e.den.degree(),
                });
            }
        }
        Ok(Self { dim, entries })
    }

    /// Constant gain matrix.
    pub fn constant(k: &DMatrix<f64>) -> Result<Self> {
        if k.nrows() != k.ncols() {
            return Err(Error::Dimension("gain matrix must be square".into()));
        }
        let n = k.nrows();
        let entries = (0..n * n)
            .map(|idx| RationalFunction::constant(k[(idx / n, idx % n)]))
            .collect();
        Self::new(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> &RationalFunction {
        &self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[RationalFunction] {
        &self.entries
    }

    /// `H(j omega)` with the default pole tolerance.
    pub fn eval_response(&self, omega: f64) -> Result<CMatrix> {
        self.eval_response_with(omega, POLE_TOLERANCE)
    }

    pub fn eval_response_with(&self, omega: f64, pole_tol: f64) -> Result<CMatrix> {
        let n = self.dim;
        let mut out = CMatrix::zeros(n, n);
        for (k, e) in self.entries.iter().enumerate() {
            let (row, col) = (k / n, k % n);
            let (v, den_mag) = e.eval_at(omega);
            if den_mag < pole_tol || !v.is_finite() {
                return Err(Error::PoleOnAxis {
                    row,
                    col,
                    omega,
                    magnitude: den_mag,
                });
            }
            out[(row, col)] = v;
        }
        Ok(out)
    }

    /// `lim_{s -> inf} H(s)`.
    pub fn feedthrough(&self) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |i, j| self.entry(i, j).feedthrough())
    }

    /// Model-file text: `dim <m>` header followed by the bracketed matrix.
    pub fn to_model_text(&self) -> String {
        format!("dim {}\n{}\n", self.dim, self)
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[ ")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, " ;\n  ")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, " , ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
        }
        write!(f, " ]")
    }
}

/// Entrywise conjugate, used to check `H(-j omega) = conj(H(j omega))`.
pub fn conj_matrix(m: &CMatrix) -> CMatrix {
    m.map(|z: Complex64| z.conj())
}
