use super::{norm, SparseMatrix};
use crate::error::{Error, Result};

/// Diagonal of the leading block plus a diagonal approximation of the Schur
/// complement on the trailing block.
pub(crate) struct BlockDiagonal {
    inv: Vec<f64>,
}

impl BlockDiagonal {
    pub fn new(m: &SparseMatrix, split: usize) -> Self {
        let n = m.nrows();
        let diag: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
        let mut inv = vec![1.0; n];
        for i in 0..split.min(n) {
            if diag[i] != 0.0 {
                inv[i] = 1.0 / diag[i];
            }
        }
        for k in split..n {
            let (cols, vals) = m.row(k);
            let mut s = diag[k];
            for (&j, &v) in cols.iter().zip(vals) {
                if j < split && diag[j] != 0.0 {
                    s -= v * m.get(j, k) / diag[j];
                }
            }
            if s != 0.0 {
                inv[k] = 1.0 / s;
            }
        }
        BlockDiagonal { inv }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.inv).map(|(a, b)| a * b).collect()
    }
}

/// Right-preconditioned restarted GMRES. Returns the iterate and the number
/// of inner iterations performed.
pub(crate) fn gmres(
    m: &SparseMatrix,
    b: &[f64],
    pre: &BlockDiagonal,
    restart: usize,
    max_iters: usize,
    tol: f64,
) -> Result<(Vec<f64>, usize)> {
    let n = b.len();
    let restart = restart.max(1);
    let b_norm = norm(b);
    let mut x = vec![0.0; n];
    let mut total = 0;
    let mut res = 1.0;
    while total < max_iters {
        let mx = m.spmv(&x)?;
        let r: Vec<f64> = b.iter().zip(&mx).map(|(a, c)| a - c).collect();
        let beta = norm(&r);
        res = beta / b_norm;
        if res <= tol {
            return Ok((x, total));
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut h = vec![vec![0.0; restart]; restart + 1];
        let mut cs = vec![0.0; restart];
        let mut sn = vec![0.0; restart];
        let mut g = vec![0.0; restart + 1];
        g[0] = beta;
        let mut k = 0;
        while k < restart && total < max_iters {
            let z = pre.apply(&basis[k]);
            let mut w = m.spmv(&z)?;
            for (i, v) in basis.iter().enumerate() {
                let hij: f64 = w.iter().zip(v).map(|(a, b)| a * b).sum();
                h[i][k] = hij;
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= hij * vi;
                }
            }
            let wn = norm(&w);
            h[k + 1][k] = wn;
            for i in 0..k {
                let t = cs[i] * h[i][k] + sn[i] * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let d = h[k][k].hypot(h[k + 1][k]);
            cs[k] = if d == 0.0 { 1.0 } else { h[k][k] / d };
            sn[k] = if d == 0.0 { 0.0 } else { h[k + 1][k] / d };
            h[k][k] = d;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k += 1;
            res = g[k].abs() / b_norm;
            if res <= tol || wn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / wn).collect());
        }
        // back substitution
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        let mut update = vec![0.0; n];
        for (yi, v) in y.iter().zip(&basis) {
            for (u, vi) in update.iter_mut().zip(v) {
                *u += yi * vi;
            }
        }
        let z = pre.apply(&update);
        for (xi, zi) in x.iter_mut().zip(&z) {
            *xi += zi;
        }
    }
    let mx = m.spmv(&x)?;
    let r: Vec<f64> = b.iter().zip(&mx).map(|(a, c)| a - c).collect();
    let final_res = norm(&r) / b_norm;
    if final_res <= tol {
        Ok((x, total))
    } else {
        Err(Error::NoConvergence(final_res.min(res.max(final_res)), total))
    }
}
