use super::{dot, norm2, DenseMatrix};
use crate::error::{Error, Result};

/// Conjugate gradients from a zero start.
///
/// On a consistent singular PSD system the iterates never leave `Im(L)`, so
/// the limit is the minimum-norm solution.
pub(crate) fn solve(l: &DenseMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = b.len();
    let b_norm = norm2(b);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    if rr.sqrt() <= tol * b_norm {
        return Ok(x);
    }
    for _ in 0..max_iter {
        let lp = l.mul_vec(&p);
        let plp = dot(&p, &lp);
        if !(plp > 0.0) {
            // p in the null space: b has a component outside Im(L); let the
            // caller's residual check report it.
            return Ok(x);
        }
        let alpha = rr / plp;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * lp[i];
        }
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= tol * b_norm {
            return Ok(x);
        }
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
    })
}
