//! Dense complex linear-algebra helpers shared by every module.
//!
//! All matrices are small (N ≤ 32) and dense; nalgebra's Hermitian
//! eigensolver and Cholesky factorization do the heavy lifting.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[inline]
pub fn cplx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `(A + A^H) / 2`.
pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * cplx(0.5)
}

/// Real inner product `Re tr(A^H B)`; equals `tr(A B)` when `A` is Hermitian.
pub fn inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// `v v^H`.
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// `Re(v^H A v)`.
pub fn quad_form(a: &CMatrix, v: &CVector) -> f64 {
    v.dotc(&(a * v)).re
}

/// `|u^H v|^2`.
pub fn abs2_dot(u: &CVector, v: &CVector) -> f64 {
    u.dotc(v).norm_sqr()
}

pub fn trace_re(a: &CMatrix) -> f64 {
    a.diagonal().iter().map(|z| z.re).sum()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    pub fn new(a: &CMatrix) -> Self {
        let eig = SymmetricEigen::new(hermitize(a));
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Eigh { values, vectors }
    }

    pub fn max_value(&self) -> f64 {
        self.values[0]
    }

    pub fn min_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }
}

/// Largest eigenvalue and a unit-norm eigenvector of a Hermitian matrix.
pub fn leading_eigenpair(a: &CMatrix) -> (f64, CVector) {
    let e = Eigh::new(a);
    (e.max_value(), e.vector(0))
}

/// Cholesky factorization of a Hermitian matrix, `None` unless it is
/// positive definite.
///
/// nalgebra's complex Cholesky takes complex square roots of the pivots and
/// therefore never fails on its own; a negative pivot shows up as an
/// imaginary diagonal entry, which is rejected here.
pub fn hpd_cholesky(a: &CMatrix) -> Option<Cholesky<Complex64, Dyn>> {
    let chol = hermitize(a).cholesky()?;
    let ok = chol
        .l_dirty()
        .diagonal()
        .iter()
        .all(|d| d.re > 0.0 && d.re.is_finite() && d.im.abs() <= 1e-9 * d.re);
    ok.then_some(chol)
}

/// Cholesky factor `L` with `A = L L^H`, or a numerical error if `A` is not
/// positive definite.
pub fn cholesky_lower(a: &CMatrix) -> Result<CMatrix> {
    hpd_cholesky(a)
        .map(|c| c.l())
        .ok_or_else(|| Error::Numerical("matrix is not Hermitian positive definite".into()))
}

/// Solve `A x = b` for Hermitian positive-definite `A`.
pub fn hpd_solve(a: &CMatrix, b: &CVector) -> Result<CVector> {
    let chol = hpd_cholesky(a).ok_or_else(|| Error::Numerical("matrix is not Hermitian positive definite".into()))?;
    Ok(chol.solve(b))
}

pub fn normalized(v: &CVector) -> CVector {
    let n = v.norm();
    if n > 0.0 {
        v / cplx(n)
    } else {
        v.clone()
    }
}

/// Scale `v` so that `v^H v == power`.
pub fn with_power(v: &CVector, power: f64) -> CVector {
    normalized(v) * cplx(power.sqrt())
}

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
