//! Problem instances: the random regression family, graph incidence
//! instances, the plain-text file format and an exact LP oracle for small
//! instances.

mod graph;
mod io;
mod oracle;
pub mod rng;

pub use graph::{incidence_matrix, parse_demand, parse_edges, DirectedGraph};
pub use io::{format_instance, parse_instance, read_instance, write_instance};
pub use oracle::{lp_oracle, lp_oracle_with_budget, DEFAULT_ENUMERATION_BUDGET, MAX_ORACLE_COLUMNS};

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    dot, norm2, weighted_least_squares, DenseMatrix, RealVector, SolveOptions, WeightRole,
    WeightVector,
};

/// `A x = b` with an optional known solution.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionInstance {
    pub a: DenseMatrix,
    pub b: RealVector,
    /// The planted solution, when known.
    pub truth: Option<RealVector>,
    /// Generator seed; not stored in instance files.
    pub seed: Option<u64>,
}

impl RegressionInstance {
    /// Builds an instance after checking dimensions and that `b` lies in the
    /// column span of `A`.
    pub fn new(a: DenseMatrix, b: RealVector, truth: Option<RealVector>) -> Result<Self> {
        crate::error::check_len("b", b.len(), a.n_rows())?;
        if let Some(t) = &truth {
            crate::error::check_len("truth", t.len(), a.n_cols())?;
        }
        if !b.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("b has non-finite entries".into()));
        }
        check_span(&a, &b)?;
        Ok(Self {
            a,
            b,
            truth,
            seed: None,
        })
    }

    pub fn n(&self) -> usize {
        self.a.n_rows()
    }

    pub fn m(&self) -> usize {
        self.a.n_cols()
    }
}

/// Fails with [`Error::Span`] unless `b` is in the column span of `A`.
pub fn check_span(a: &DenseMatrix, b: &[f64]) -> Result<()> {
    let w = WeightVector::uniform(a.n_cols(), WeightRole::Conductances)?;
    match weighted_least_squares(a, b, &w, &SolveOptions::default()) {
        Ok(_) => Ok(()),
        Err(Error::Range { .. }) => Err(Error::Span),
        Err(e) => Err(e),
    }
}

const MAX_REDRAWS: usize = 16;

/// Random `n x m` instance with orthonormal rows and `b = A x*`, where `x*`
/// has exactly `k` entries equal to `+-1`.
pub fn random_orthogonal_instance(n: usize, m: usize, k: usize, seed: u64) -> Result<RegressionInstance> {
    random_orthogonal_instance_stream(n, m, k, seed, 0)
}

/// [`random_orthogonal_instance`] drawn from sub-stream `stream` of `seed`.
pub fn random_orthogonal_instance_stream(
    n: usize,
    m: usize,
    k: usize,
    seed: u64,
    stream: u64,
) -> Result<RegressionInstance> {
    if n == 0 || n > m {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n <= m, got n = {n}, m = {m}"
        )));
    }
    if k == 0 || k > m {
        return Err(Error::InvalidArgument(format!(
            "sparsity must lie in [1, {m}], got {k}"
        )));
    }
    let mut rng = rng::stream_rng(seed, stream);
    let rows = (0..MAX_REDRAWS)
        .find_map(|_| orthonormal_rows(&mut rng, n, m))
        .ok_or_else(|| Error::InvalidArgument("could not draw a full-rank matrix".into()))?;
    let a = DenseMatrix::from_rows(&rows)?;

    let mut truth = vec![0.0; m];
    for i in sample(&mut rng, m, k) {
        truth[i] = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    }
    let b = a.mul_vec(&truth);
    Ok(RegressionInstance {
        a,
        b,
        truth: Some(truth),
        seed: Some(seed),
    })
}

/// Gaussian rows orthonormalized by modified Gram-Schmidt (two passes).
/// `None` if a row collapses.
fn orthonormal_rows<R: Rng>(rng: &mut R, n: usize, m: usize) -> Option<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let original = norm2(&v);
        for _ in 0..2 {
            for q in &rows {
                let p = dot(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= p * qi;
                }
            }
        }
        let len = norm2(&v);
        if !(len > 1e-8 * original) {
            return None;
        }
        v.iter_mut().for_each(|x| *x /= len);
        rows.push(v);
    }
    Some(rows)
}
