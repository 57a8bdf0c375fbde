//! Sparse storage and solution of the saddle-point systems.
//!
//! The default path is a sparse LU factorisation with partial pivoting
//! (faer's supernodal LU behind COLAMD ordering) followed by a few steps of
//! iterative refinement. A restarted GMRES with a block-diagonal
//! preconditioner is available as an alternative.

mod gmres;
mod sparse;

pub use sparse::SparseMatrix;

use std::time::Instant;

use faer::sparse::{SparseColMat, Triplet};
use faer::linalg::solvers::Solve;
use faer::Mat;

use crate::error::{Error, Result};
use crate::mixed::{AssembledSystem, MixedSolution};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverKind {
    SparseLu,
    Gmres { restart: usize, max_iters: usize },
}

impl Default for SolverKind {
    fn default() -> Self {
        SolverKind::SparseLu
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub kind: SolverKind,
    /// Required relative residual `||Mx - b|| / ||b||`.
    pub tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            kind: SolverKind::SparseLu,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Relative residual `||Mx - b||_2 / ||b||_2` (zero for `b = 0`).
    pub residual: f64,
    /// Refinement steps (LU) or Krylov iterations (GMRES).
    pub iterations: usize,
    pub nnz: usize,
    pub seconds: f64,
    pub method: &'static str,
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn relative_residual(matrix: &SparseMatrix, x: &[f64], rhs: &[f64], rhs_norm: f64) -> Result<(f64, Vec<f64>)> {
    let mx = matrix.spmv(x)?;
    let r: Vec<f64> = rhs.iter().zip(&mx).map(|(b, m)| b - m).collect();
    Ok((norm(&r) / rhs_norm, r))
}

/// Solves `matrix x = rhs`. `split` is the size of the leading (flux) block,
/// used by the GMRES preconditioner.
pub fn solve_linear(
    matrix: &SparseMatrix,
    rhs: &[f64],
    split: Option<usize>,
    options: &SolverOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let start = Instant::now();
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: matrix.ncols(),
        });
    }
    if rhs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    let rhs_norm = norm(rhs);
    let method = match options.kind {
        SolverKind::SparseLu => "sparse-lu",
        SolverKind::Gmres { .. } => "gmres",
    };
    if rhs_norm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveReport {
                residual: 0.0,
                iterations: 0,
                nnz: matrix.nnz(),
                seconds: start.elapsed().as_secs_f64(),
                method,
            },
        ));
    }
    let (x, residual, iterations) = match options.kind {
        SolverKind::SparseLu => lu_solve(matrix, rhs, rhs_norm, options.tolerance)?,
        SolverKind::Gmres { restart, max_iters } => {
            let pre = gmres::BlockDiagonal::new(matrix, split.unwrap_or(n));
            let (x, iters) = gmres::gmres(matrix, rhs, &pre, restart, max_iters, options.tolerance)?;
            let (res, _) = relative_residual(matrix, &x, rhs, rhs_norm)?;
            (x, res, iters)
        }
    };
    if !(residual <= options.tolerance) {
        return Err(Error::ResidualTooLarge {
            achieved: residual,
            tolerance: options.tolerance,
        });
    }
    Ok((
        x,
        SolveReport {
            residual,
            iterations,
            nnz: matrix.nnz(),
            seconds: start.elapsed().as_secs_f64(),
            method,
        },
    ))
}

fn lu_solve(matrix: &SparseMatrix, rhs: &[f64], rhs_norm: f64, tol: f64) -> Result<(Vec<f64>, f64, usize)> {
    let n = matrix.nrows();
    let triplets: Vec<Triplet<usize, usize, f64>> = matrix.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    let csc = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::SingularMatrix(format!("{e:?}")))?;
    let lu = csc.sp_lu().map_err(|e| Error::SingularMatrix(format!("{e:?}")))?;
    let solve = |b: &[f64]| -> Vec<f64> {
        let col = Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
        let x = lu.solve(&col);
        (0..n).map(|i| x[(i, 0)]).collect()
    };
    let mut x = solve(rhs);
    let (mut res, mut r) = relative_residual(matrix, &x, rhs, rhs_norm)?;
    let mut steps = 0;
    // iterative refinement; a few steps recover accuracy lost to pivot growth
    while !(res <= 0.01 * tol) && steps < 3 && res.is_finite() {
        let dx = solve(&r);
        let candidate: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let (new_res, new_r) = relative_residual(matrix, &candidate, rhs, rhs_norm)?;
        steps += 1;
        if !(new_res < res) {
            break;
        }
        x = candidate;
        res = new_res;
        r = new_r;
    }
    if !res.is_finite() {
        return Err(Error::SingularMatrix("factorization produced non-finite values".into()));
    }
    Ok((x, res, steps))
}

/// Solves an assembled mixed system and splits the result into flux and
/// scalar parts.
pub fn solve(system: &AssembledSystem, options: &SolverOptions) -> Result<(MixedSolution, SolveReport)> {
    let (x, report) = solve_linear(&system.matrix, &system.rhs, Some(system.n_u()), options)?;
    Ok((MixedSolution::from_stacked(&x, system.n_u()), report))
}
