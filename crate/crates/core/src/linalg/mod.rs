//! Dense real linear algebra.
//!
//! Everything the solvers need reduces to one primitive: given a constraint
//! matrix `A` and positive column weights, form `L = A diag(c) A^T` and apply
//! its Moore-Penrose pseudoinverse to a right-hand side. [`pseudo_solve`]
//! does the latter with either a direct factorization or conjugate
//! gradients; [`weighted_least_squares`] wraps both steps and returns the
//! coupled flow/potential pair.

mod cg;
mod cholesky;
mod matrix;
mod weights;

pub use matrix::DenseMatrix;
pub use weights::{WeightRole, WeightVector};

use crate::error::{check_len, Error, Result};

/// Vectors are plain `Vec<f64>`; finiteness is checked at the boundaries
/// (matrix construction, file parsing, weight construction).
pub type RealVector = Vec<f64>;

/// Which pseudo-solve path to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Direct factorization up to `direct_max_dim`, conjugate gradients above.
    #[default]
    Auto,
    Direct,
    ConjugateGradient,
}

/// Tolerances for [`pseudo_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub backend: Backend,
    /// Eigenvalues (or Cholesky pivots) below `rank_tol * largest` count as zero.
    pub rank_tol: f64,
    /// `||L phi - b|| > residual_tol * ||b||` after solving means `b` is not in `Im(L)`.
    pub residual_tol: f64,
    /// Relative residual at which conjugate gradients stops.
    pub cg_tol: f64,
    /// Conjugate gradients gives up after `cg_max_iter_factor * n` iterations.
    pub cg_max_iter_factor: usize,
    pub direct_max_dim: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            backend: Backend::Auto,
            rank_tol: 1e-12,
            residual_tol: 1e-8,
            cg_tol: 1e-10,
            cg_max_iter_factor: 20,
            direct_max_dim: 2000,
        }
    }
}

/// Flow, potentials and energy of the weighted least-squares problem
/// `min <r, x^2> s.t. Ax = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectricalSolution {
    pub flow: RealVector,
    pub potentials: RealVector,
    pub energy: f64,
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // Four independent accumulators let the loop vectorize.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for i in 0..chunks {
        let j = 4 * i;
        acc[0] += a[j] * b[j];
        acc[1] += a[j + 1] * b[j + 1];
        acc[2] += a[j + 2] * b[j + 2];
        acc[3] += a[j + 3] * b[j + 3];
    }
    let mut tail = 0.0;
    for j in 4 * chunks..a.len() {
        tail += a[j] * b[j];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `A diag(w) A^T` for an `n x m` matrix `A`.
pub fn gram(a: &DenseMatrix, w: &WeightVector) -> Result<DenseMatrix> {
    gram_raw(a, w.values())
}

/// [`gram`] on raw column weights; no positivity requirement.
pub fn gram_raw(a: &DenseMatrix, w: &[f64]) -> Result<DenseMatrix> {
    check_len("weight vector", w.len(), a.n_cols())?;
    let n = a.n_rows();
    let m = a.n_cols();
    let mut scaled = a.as_slice().to_vec();
    for row in scaled.chunks_exact_mut(m) {
        for (x, wk) in row.iter_mut().zip(w) {
            *x *= wk;
        }
    }
    let mut out = vec![0.0; n * n];
    // SAFETY: `scaled` is n x m row-major, `a` read with swapped strides is
    // its m x n transpose, and `out` is n x n row-major; all three buffers
    // have exactly the sizes the strides describe.
    unsafe {
        matrixmultiply::dgemm(
            n,
            m,
            n,
            1.0,
            scaled.as_ptr(),
            m as isize,
            1,
            a.as_slice().as_ptr(),
            1,
            m as isize,
            0.0,
            out.as_mut_ptr(),
            n as isize,
            1,
        );
    }
    // the kernel's summation order differs between (i, j) and (j, i)
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (out[i * n + j] + out[j * n + i]);
            out[i * n + j] = v;
            out[j * n + i] = v;
        }
    }
    Ok(DenseMatrix::from_row_major_unchecked(n, n, out))
}

/// Minimum-norm solution of `L phi = b` for symmetric positive semidefinite `L`.
///
/// Fails with [`Error::Range`] when the best solution still leaves a relative
/// residual above `opts.residual_tol`, i.e. `b` is (numerically) outside
/// `Im(L)`.
pub fn pseudo_solve(l: &DenseMatrix, b: &[f64], opts: &SolveOptions) -> Result<RealVector> {
    let n = l.n_rows();
    if l.n_cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "pseudo_solve needs a square matrix, got {}x{}",
            n,
            l.n_cols()
        )));
    }
    check_len("right-hand side", b.len(), n)?;
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }

    let use_cg = match opts.backend {
        Backend::Auto => n > opts.direct_max_dim,
        Backend::Direct => false,
        Backend::ConjugateGradient => true,
    };
    let phi = if use_cg {
        cg::solve(l, b, opts.cg_tol, opts.cg_max_iter_factor.saturating_mul(n).max(1))?
    } else {
        match cholesky::PivotedCholesky::factor(l, opts.rank_tol) {
            Some(f) => f.solve(b),
            None => eigen_pseudo_solve(l, b, opts.rank_tol),
        }
    };

    let lphi = l.mul_vec(&phi);
    let residual = lphi
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
        / b_norm;
    if !(residual <= opts.residual_tol) {
        return Err(Error::Range { residual });
    }
    Ok(phi)
}

/// Pseudoinverse through the symmetric eigendecomposition.
fn eigen_pseudo_solve(l: &DenseMatrix, b: &[f64], rank_tol: f64) -> RealVector {
    let n = l.n_rows();
    let mat = nalgebra::DMatrix::from_row_slice(n, n, l.as_slice());
    let eig = nalgebra::SymmetricEigen::new(mat);
    let largest = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut phi = vec![0.0; n];
    if largest == 0.0 {
        return phi;
    }
    let cutoff = rank_tol * largest;
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= cutoff {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        let coef = v.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / lambda;
        for (p, x) in phi.iter_mut().zip(v.iter()) {
            *p += coef * x;
        }
    }
    phi
}

/// Solves `min <r, x^2> s.t. Ax = b` for the given weights.
///
/// Resistances and conductances are both accepted; the system matrix is
/// always `A diag(c) A^T` with `c` the conductances. The potentials are
/// `phi = (A diag(c) A^T)^+ b`, the flow is `x_i = c_i (A^T phi)_i` and the
/// reported energy is `b^T phi`.
pub fn weighted_least_squares(
    a: &DenseMatrix,
    b: &[f64],
    w: &WeightVector,
    opts: &SolveOptions,
) -> Result<ElectricalSolution> {
    check_len("b", b.len(), a.n_rows())?;
    check_len("weights", w.len(), a.n_cols())?;
    let c = w.conductances_vec();
    solve_with_conductances(a, b, &c, opts)
}

pub(crate) fn solve_with_conductances(
    a: &DenseMatrix,
    b: &[f64],
    c: &[f64],
    opts: &SolveOptions,
) -> Result<ElectricalSolution> {
    let l = gram_raw(a, c)?;
    let phi = pseudo_solve(&l, b, opts)?;
    let atphi = a.tr_mul_vec(&phi);
    let flow: Vec<f64> = atphi.iter().zip(c).map(|(g, ci)| g * ci).collect();
    let energy = dot(b, &phi);
    Ok(ElectricalSolution {
        flow,
        potentials: phi,
        energy,
    })
}
