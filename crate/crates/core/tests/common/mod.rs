#![allow(dead_code)]

use irls_core::instances::{lp_oracle, random_orthogonal_instance_stream, RegressionInstance};
use irls_core::linalg::DenseMatrix;
use irls_core::Norm;
use rand::Rng;

/// One small instance with both exact optima.
pub struct OracleCase {
    pub inst: RegressionInstance,
    pub opt_linf: f64,
    pub opt_l1: f64,
}

/// `count` instances with `n in 1..=4`, `m in 2..=8`, `n <= m`, each from
/// its own stream of `seed`.
pub fn oracle_suite(seed: u64, count: usize) -> Vec<OracleCase> {
    let mut rng = irls_core::instances::rng::stream_rng(seed, u64::MAX);
    (0..count)
        .map(|i| {
            let m = rng.random_range(2..=8);
            let n = rng.random_range(1..=4.min(m));
            let k = rng.random_range(1..=m);
            let inst = random_orthogonal_instance_stream(n, m, k, seed, i as u64).unwrap();
            let opt_linf = lp_oracle(&inst.a, &inst.b, Norm::Linf).unwrap();
            let opt_l1 = lp_oracle(&inst.a, &inst.b, Norm::L1).unwrap();
            OracleCase {
                inst,
                opt_linf,
                opt_l1,
            }
        })
        .collect()
}

impl OracleCase {
    pub fn opt(&self, norm: Norm) -> f64 {
        match norm {
            Norm::Linf => self.opt_linf,
            Norm::L1 => self.opt_l1,
        }
    }
}

pub fn residual(a: &DenseMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
    r.sqrt()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize, m: usize) -> DenseMatrix {
    let data = (0..n * m).map(|_| rng.random_range(-1.0..1.0)).collect();
    DenseMatrix::new(n, m, data).unwrap()
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
