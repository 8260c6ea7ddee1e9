//! Model representation: polynomials, proper rational transfer matrices,
//! state-space realizations, the model-file parser and frequency responses.

mod bundled;
mod grid;
mod io;
mod matrix;
mod parser;
mod poly;
mod rational;
mod statespace;

use std::borrow::Cow;

use nalgebra::DMatrix;

pub use bundled::{bundled_model, BUNDLED_MODELS};
pub use grid::{FrequencyGrid, GridScale};
pub use io::{load_model, parse_json_model, parse_model, to_json_model};
pub use matrix::{conj_matrix, RationalMatrix, POLE_TOLERANCE};
pub use parser::parse_rational_matrix;
pub use poly::Polynomial;
pub use rational::RationalFunction;
pub use statespace::{realize, HurwitzReport, StateSpaceModel};

use crate::error::Result;
use crate::linalg::CMatrix;

/// Anything that has a square frequency response and a state-space realization.
pub trait LtiModel: Sync {
    fn dim(&self) -> usize;

    /// `H(j omega)`.
    fn response(&self, omega: f64) -> Result<CMatrix>;

    /// `lim_{omega -> inf} H(j omega)`.
    fn feedthrough(&self) -> DMatrix<f64>;

    fn state_space(&self) -> Cow<'_, StateSpaceModel>;
}

impl LtiModel for RationalMatrix {
    fn dim(&self) -> usize {
        RationalMatrix::dim(self)
    }

    fn response(&self, omega: f64) -> Result<CMatrix> {
        self.eval_response(omega)
    }

    fn feedthrough(&self) -> DMatrix<f64> {
        RationalMatrix::feedthrough(self)
    }

    fn state_space(&self) -> Cow<'_, StateSpaceModel> {
        Cow::Owned(realize(self))
    }
}

impl LtiModel for StateSpaceModel {
    fn dim(&self) -> usize {
        StateSpaceModel::dim(self)
    }

    fn response(&self, omega: f64) -> Result<CMatrix> {
        StateSpaceModel::response(self, omega)
    }

    fn feedthrough(&self) -> DMatrix<f64> {
        self.d.clone()
    }

    fn state_space(&self) -> Cow<'_, StateSpaceModel> {
        Cow::Borrowed(self)
    }
}

/// A transfer matrix bundled with its realization, computed once.
#[derive(Debug, Clone)]
pub struct Model {
    tf: Option<RationalMatrix>,
    ss: StateSpaceModel,
}

impl Model {
    pub fn from_rational(tf: RationalMatrix) -> Self {
        let ss = realize(&tf);
        Self { tf: Some(tf), ss }
    }

    pub fn from_state_space(ss: StateSpaceModel) -> Self {
        Self { tf: None, ss }
    }

    pub fn transfer_matrix(&self) -> Option<&RationalMatrix> {
        self.tf.as_ref()
    }

    pub fn realization(&self) -> &StateSpaceModel {
        &self.ss
    }
}

impl LtiModel for Model {
    fn dim(&self) -> usize {
        self.ss.dim()
    }

    fn response(&self, omega: f64) -> Result<CMatrix> {
        match &self.tf {
            Some(tf) => tf.eval_response(omega),
            None => self.ss.response(omega),
        }
    }

    fn feedthrough(&self) -> DMatrix<f64> {
        self.ss.d.clone()
    }

    fn state_space(&self) -> Cow<'_, StateSpaceModel> {
        Cow::Borrowed(&self.ss)
    }
}

impl From<RationalMatrix> for Model {
    fn from(tf: RationalMatrix) -> Self {
        Self::from_rational(tf)
    }
}

impl From<StateSpaceModel> for Model {
    fn from(ss: StateSpaceModel) -> Self {
        Self::from_state_space(ss)
    }
}
