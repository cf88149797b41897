//! Sparse direct solves for the C-linear systems and for the real-linear
//! systems `L x + Q conj(x) = b`.
//!
//! Factorizations are sparse LU with fill-reducing ordering from `faer`.
//! Every solve recomputes the residual from the original matrix and applies
//! up to [`MAX_REFINEMENT_STEPS`] steps of iterative refinement.

use faer::prelude::*;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use thiserror::Error;

use crate::assembly::{ComplexSparseMatrix, CsrMatrix};
use crate::scalar::{lit, norm2, to_f64, Complex, Real};

pub const MAX_REFINEMENT_STEPS: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("dimension mismatch: matrix is {matrix} x {matrix}, vector has length {vector}")]
    DimensionMismatch { matrix: usize, vector: usize },
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("solve did not reach the residual tolerance: relative residual {0:.3e}")]
    Inaccurate(f64),
}

/// Outcome of one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSolveReport {
    pub relative_residual: f64,
    pub dimension: usize,
    pub nonzeros: usize,
    pub refinement_steps: usize,
    pub success: bool,
}

/// Relative residual required for a successful solve.
pub fn residual_tolerance<T: Real>() -> T {
    lit::<T>(1e-10).max(T::epsilon() * lit(1e3))
}

/// Binding to the sparse LU of the linear algebra backend.
pub trait LuBackend: Copy + Sized + 'static {
    type ComplexFactor: Send + Sync;
    type RealFactor: Send + Sync;

    fn factor_complex(n: usize, entries: &[(usize, usize, Complex<Self>)]) -> Result<Self::ComplexFactor, String>;
    fn solve_complex(factor: &Self::ComplexFactor, rhs: &mut [Complex<Self>]);
    fn factor_real(n: usize, entries: &[(usize, usize, Self)]) -> Result<Self::RealFactor, String>;
    fn solve_real(factor: &Self::RealFactor, rhs: &mut [Self]);
}

macro_rules! faer_backend {
    ($t:ty) => {
        impl LuBackend for $t {
            type ComplexFactor = Lu<usize, Complex<$t>>;
            type RealFactor = Lu<usize, $t>;

            fn factor_complex(
                n: usize,
                entries: &[(usize, usize, Complex<$t>)],
            ) -> Result<Self::ComplexFactor, String> {
                let t: Vec<_> = entries.iter().map(|&(i, j, v)| Triplet::new(i, j, v)).collect();
                let m = SparseColMat::<usize, Complex<$t>>::try_new_from_triplets(n, n, &t)
                    .map_err(|e| format!("{e:?}"))?;
                m.sp_lu().map_err(|e| format!("{e:?}"))
            }

            fn solve_complex(factor: &Self::ComplexFactor, rhs: &mut [Complex<$t>]) {
                let mut b = Mat::<Complex<$t>>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
                factor.solve_in_place(b.as_mut());
                for (i, v) in rhs.iter_mut().enumerate() {
                    *v = b[(i, 0)];
                }
            }

            fn factor_real(n: usize, entries: &[(usize, usize, $t)]) -> Result<Self::RealFactor, String> {
                let t: Vec<_> = entries.iter().map(|&(i, j, v)| Triplet::new(i, j, v)).collect();
                let m = SparseColMat::<usize, $t>::try_new_from_triplets(n, n, &t).map_err(|e| format!("{e:?}"))?;
                m.sp_lu().map_err(|e| format!("{e:?}"))
            }

            fn solve_real(factor: &Self::RealFactor, rhs: &mut [$t]) {
                let mut b = Mat::<$t>::from_fn(rhs.len(), 1, |i, _| rhs[i]);
                factor.solve_in_place(b.as_mut());
                for (i, v) in rhs.iter_mut().enumerate() {
                    *v = b[(i, 0)];
                }
            }
        }
    };
}

faer_backend!(f32);
faer_backend!(f64);

fn check_dim(n: usize, len: usize) -> Result<(), SolveError> {
    if n == len {
        Ok(())
    } else {
        Err(SolveError::DimensionMismatch { matrix: n, vector: len })
    }
}

fn finite<T: Real>(v: &[Complex<T>]) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Reusable factorization of a complex sparse matrix.
pub struct ComplexLu<'a, T: Real> {
    matrix: &'a ComplexSparseMatrix<T>,
    factor: T::ComplexFactor,
}

impl<'a, T: Real> ComplexLu<'a, T> {
    pub fn new(matrix: &'a ComplexSparseMatrix<T>) -> Result<Self, SolveError> {
        let entries: Vec<_> = matrix.triplets().collect();
        let factor = T::factor_complex(matrix.n(), &entries).map_err(SolveError::Factorization)?;
        Ok(Self { matrix, factor })
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Result<(Vec<Complex<T>>, LinearSolveReport), SolveError> {
        let n = self.matrix.n();
        check_dim(n, b.len())?;
        refine(n, self.matrix.nnz(), b, |rhs| T::solve_complex(&self.factor, rhs), |x| self.matrix.mul_vec(x))
    }
}

fn refine<T: Real>(
    n: usize,
    nonzeros: usize,
    b: &[Complex<T>],
    solve: impl Fn(&mut [Complex<T>]),
    apply: impl Fn(&[Complex<T>]) -> Vec<Complex<T>>,
) -> Result<(Vec<Complex<T>>, LinearSolveReport), SolveError> {
    let bnorm = norm2(b);
    let mut report =
        LinearSolveReport { relative_residual: 0.0, dimension: n, nonzeros, refinement_steps: 0, success: true };
    if bnorm == T::zero() {
        return Ok((b.to_vec(), report));
    }
    let tol = residual_tolerance::<T>();
    let mut x = b.to_vec();
    solve(&mut x);
    let mut residual: Vec<_> = b.iter().zip(apply(&x)).map(|(bi, ai)| *bi - ai).collect();
    let mut rel = norm2(&residual) / bnorm;
    while !(rel <= tol * lit(1e-2)) && report.refinement_steps < MAX_REFINEMENT_STEPS && finite(&x) {
        solve(&mut residual);
        let candidate: Vec<_> = x.iter().zip(&residual).map(|(a, d)| *a + *d).collect();
        let r: Vec<_> = b.iter().zip(apply(&candidate)).map(|(bi, ai)| *bi - ai).collect();
        let cand_rel = norm2(&r) / bnorm;
        report.refinement_steps += 1;
        if !(cand_rel < rel) {
            break;
        }
        x = candidate;
        residual = r;
        rel = cand_rel;
    }
    report.relative_residual = to_f64(rel);
    report.success = rel <= tol && finite(&x);
    if report.success {
        Ok((x, report))
    } else {
        Err(SolveError::Inaccurate(report.relative_residual))
    }
}

/// Solves `M x = b`.
pub fn solve<T: Real>(
    matrix: &ComplexSparseMatrix<T>,
    b: &[Complex<T>],
) -> Result<(Vec<Complex<T>>, LinearSolveReport), SolveError> {
    check_dim(matrix.n(), b.len())?;
    ComplexLu::new(matrix)?.solve(b)
}

/// Real `2n x 2n` block matrix of `x -> L x + Q conj(x)` acting on `(Re x, Im x)`.
pub fn real_augmented<T: Real>(l: &ComplexSparseMatrix<T>, q: &ComplexSparseMatrix<T>) -> CsrMatrix<T> {
    let n = l.n();
    let mut triplets = Vec::with_capacity(4 * (l.nnz() + q.nnz()));
    for (i, j, v) in l.triplets() {
        triplets.extend_from_slice(&[(i, j, v.re), (i, n + j, -v.im), (n + i, j, v.im), (n + i, n + j, v.re)]);
    }
    for (i, j, v) in q.triplets() {
        triplets.extend_from_slice(&[(i, j, v.re), (i, n + j, v.im), (n + i, j, v.im), (n + i, n + j, -v.re)]);
    }
    CsrMatrix::from_triplets(2 * n, triplets)
}

/// Solves `L x + Q conj(x) = b` through the real augmented system.
pub fn solve_antilinear<T: Real>(
    l: &ComplexSparseMatrix<T>,
    q: &ComplexSparseMatrix<T>,
    b: &[Complex<T>],
) -> Result<(Vec<Complex<T>>, LinearSolveReport), SolveError> {
    let n = l.n();
    check_dim(n, b.len())?;
    check_dim(n, q.n())?;
    let big = real_augmented(l, q);
    let entries: Vec<_> = big.triplets().collect();
    let factor = T::factor_real(2 * n, &entries).map_err(SolveError::Factorization)?;
    let solve = |rhs: &mut [Complex<T>]| {
        let mut real: Vec<T> = rhs.iter().map(|z| z.re).chain(rhs.iter().map(|z| z.im)).collect();
        T::solve_real(&factor, &mut real);
        for (i, z) in rhs.iter_mut().enumerate() {
            *z = Complex::new(real[i], real[n + i]);
        }
    };
    let apply = |x: &[Complex<T>]| {
        let lx = l.mul_vec(x);
        let qx = q.apply_conj(x);
        lx.iter().zip(&qx).map(|(a, b)| *a + *b).collect::<Vec<_>>()
    };
    refine(n, big.nnz(), b, solve, apply)
}
