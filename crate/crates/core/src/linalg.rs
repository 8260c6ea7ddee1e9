//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, the value of a transfer matrix at one frequency.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVector = DVector<Complex64>;

const EIG_EPS: f64 = f64::EPSILON;
const EIG_MAX_ITER: usize = 10_000;

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Determinant through partial-pivot LU. The empty matrix has determinant 1.
pub fn det(m: &CMatrix) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Eigenvalues of a complex square matrix.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    match m.nrows() {
        0 => Ok(Vec::new()),
        1 => Ok(vec![m[(0, 0)]]),
        _ => {
            let schur =
                Schur::try_new(m.clone(), EIG_EPS, EIG_MAX_ITER).ok_or(Error::EigenNonConvergence)?;
            let ev = schur.eigenvalues().ok_or(Error::EigenNonConvergence)?;
            Ok(ev.iter().copied().collect())
        }
    }
}

/// Eigenvalues of a real square matrix.
pub fn real_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(a.clone(), EIG_EPS, EIG_MAX_ITER).ok_or(Error::EigenNonConvergence)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Largest real part among the eigenvalues; `-inf` for an empty matrix.
pub fn spectral_abscissa(a: &DMatrix<f64>) -> Result<f64> {
    Ok(real_eigenvalues(a)?
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Singular values (descending) with right singular vectors as columns of `v`.
pub struct SingularPairs {
    pub values: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(m: &CMatrix) -> Result<SingularPairs> {
    let svd = SVD::try_new(m.clone(), false, true, EIG_EPS, EIG_MAX_ITER)
        .ok_or(Error::EigenNonConvergence)?;
    let v_t = svd.v_t.ok_or(Error::EigenNonConvergence)?;
    Ok(SingularPairs {
        values: svd.singular_values.iter().copied().collect(),
        v: v_t.adjoint(),
    })
}

pub fn max_singular_value(m: &CMatrix) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    let svd = SVD::try_new(m.clone(), false, false, EIG_EPS, EIG_MAX_ITER)
        .ok_or(Error::EigenNonConvergence)?;
    Ok(svd.singular_values.max())
}

pub fn min_singular_value(m: &CMatrix) -> Result<f64> {
    if m.nrows() == 0 {
        return Ok(f64::INFINITY);
    }
    let svd = SVD::try_new(m.clone(), false, false, EIG_EPS, EIG_MAX_ITER)
        .ok_or(Error::EigenNonConvergence)?;
    Ok(svd.singular_values.min())
}

/// Unit eigenvector estimates of `m`, one per eigenvalue, taken as the right
/// singular vector of `m - lambda I` with the smallest singular value.
pub fn eigenvectors(m: &CMatrix) -> Result<Vec<CVector>> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n);
    for lambda in eigenvalues(m)? {
        let shifted = m - CMatrix::identity(n, n) * lambda;
        let pairs = svd(&shifted)?;
        let idx = argmin(&pairs.values);
        out.push(pairs.v.column(idx).into_owned());
    }
    Ok(out)
}

/// Eigenvector of the largest eigenvalue of a Hermitian matrix.
pub fn hermitian_top_eigenvector(h: &CMatrix) -> Result<CVector> {
    let eig = SymmetricEigen::try_new(h.clone(), EIG_EPS, EIG_MAX_ITER)
        .ok_or(Error::EigenNonConvergence)?;
    let idx = argmax(eig.eigenvalues.as_slice());
    Ok(eig.eigenvectors.column(idx).into_owned())
}

pub(crate) fn argmin(xs: &[f64]) -> usize {
    xs.iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &x)| if x < acc.1 { (i, x) } else { acc })
        .0
}

pub(crate) fn argmax(xs: &[f64]) -> usize {
    xs.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc })
        .0
}

/// Frobenius-norm relative difference, with an absolute floor of 1 on the scale.
pub fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = a.norm().max(b.norm()).max(1.0);
    (a - b).norm() / scale
}
