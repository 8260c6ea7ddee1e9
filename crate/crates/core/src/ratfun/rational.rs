use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Polynomial;
use crate::error::{Error, Result};

/// A proper real-rational function `num(s) / den(s)`. Common factors are kept as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalFunction {
    pub(crate) num: Polynomial,
    pub(crate) den: Polynomial,
}

impl RationalFunction {
    /// Builds `num/den`, rejecting a zero denominator and improper ratios.
    /// The error positions are reported as entry (0,0); matrix builders rewrite them.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator { row: 0, col: 0 });
        }
        if !num.is_zero() && num.degree() > den.degree() {
            return Err(Error::Improper {
                row: 0,
                col: 0,
                text: format!("({num})/({den})"),
                num_degree: num.degree(),
                den_degree: den.degree(),
            });
        }
        Ok(Self { num, den })
    }

    pub fn constant(k: f64) -> Self {
        Self {
            num: Polynomial::constant(k),
            den: Polynomial::one(),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval(s) / self.den.eval(s)
    }

    /// Value at `s = j omega` together with `|den(j omega)|`.
    pub fn eval_at(&self, omega: f64) -> (Complex64, f64) {
        let s = Complex64::new(0.0, omega);
        let d = self.den.eval(s);
        (self.num.eval(s) / d, d.norm())
    }

    /// Limit as `s -> infinity`; nonzero only for biproper entries.
    pub fn feedthrough(&self) -> f64 {
        if self.num.is_zero() || self.num.degree() < self.den.degree() {
            0.0
        } else {
            self.num.leading() / self.den.leading()
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}
