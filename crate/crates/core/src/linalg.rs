//! Hermitian positive-definite helpers on top of `nalgebra`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tensor::C64;

/// Normwise backward error accepted from a Hermitian solve.
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-10;

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Lower-triangular `L` with `L L^H = a`.
///
/// On failure retries once with `1e-12 * trace(a) / n` added to the diagonal.
pub fn cholesky_factor(a: &CMatrix) -> Result<CMatrix> {
    if let Some(c) = checked_cholesky(a.clone()) {
        return Ok(c.l());
    }
    let n = a.nrows();
    let jitter = 1e-12 * a.trace().re / n as f64;
    if jitter.is_nan() || jitter <= 0.0 {
        return Err(Error::Numerical(format!(
            "covariance with trace {} is not factorizable",
            a.trace().re
        )));
    }
    let mut b = a.clone();
    for i in 0..n {
        b[(i, i)] += C64::new(jitter, 0.0);
    }
    checked_cholesky(b)
        .map(|c| c.l())
        .ok_or_else(|| Error::Numerical("covariance not positive semidefinite".into()))
}

// The complex square root never fails, so a negative pivot shows up as an
// imaginary diagonal entry of the factor instead of a `None`.
fn checked_cholesky(a: CMatrix) -> Option<Cholesky<C64, Dyn>> {
    let c = Cholesky::new(a)?;
    let l = c.l_dirty();
    (0..l.nrows())
        .all(|i| {
            let d = l[(i, i)];
            d.re > 0.0 && d.im.abs() <= 1e-9 * d.re
        })
        .then_some(c)
}

pub fn hpd_factor(a: CMatrix) -> Result<Cholesky<C64, Dyn>> {
    checked_cholesky(a)
        .ok_or_else(|| Error::Numerical("matrix not Hermitian positive definite".into()))
}

/// Solves `a x = b` for Hermitian positive-definite `a`.
pub fn solve_hpd(a: &CMatrix, b: &CVector) -> Result<CVector> {
    let x = hpd_factor(a.clone())?.solve(b);
    let residual = (a * &x - b).norm();
    let scale = (a.norm() * x.norm() + b.norm()).max(f64::MIN_POSITIVE);
    if residual.is_nan() || residual > SOLVE_RESIDUAL_TOL * scale {
        return Err(Error::Numerical(format!(
            "Hermitian solve residual {residual:e} exceeds tolerance"
        )));
    }
    Ok(x)
}

/// `||a - a^H||_F`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    (a - a.adjoint()).norm()
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let h = (a + a.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `a^H m b` for a square block `m`.
#[inline]
pub fn quad_form(a: &[C64], m: &CMatrix, b: &[C64]) -> C64 {
    let n = a.len();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        let mut row = C64::new(0.0, 0.0);
        for j in 0..n {
            row += m[(i, j)] * b[j];
        }
        acc += a[i].conj() * row;
    }
    acc
}

/// `m v` for a square block `m` and a slice `v`.
#[inline]
pub fn mat_vec(m: &CMatrix, v: &[C64], out: &mut [C64]) {
    let n = v.len();
    for (i, o) in out.iter_mut().enumerate().take(n) {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            acc += m[(i, j)] * v[j];
        }
        *o = acc;
    }
}
