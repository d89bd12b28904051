//! Exact optimum of `min ||x|| s.t. Ax = b` for tiny instances by vertex
//! enumeration of the epigraph LP.
//!
//! l-infinity: variables `(x, t)`, minimize `t` subject to `+-x_i <= t`.
//! l1: variables `(x, u)`, minimize `sum u` subject to `+-x_i <= u_i`.
//!
//! After reducing `Ax = b` to `rho` independent rows, every vertex of the
//! feasible polyhedron (which has no lines) is the unique solution of those
//! rows plus `d - rho` active inequalities. All such subsets are tried and
//! the best feasible point wins.

use itertools::Itertools;

use crate::error::{check_len, Error, Result};
use crate::linalg::DenseMatrix;
use crate::meta::Norm;

pub const MAX_ORACLE_COLUMNS: usize = 12;
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 5_000_000;

const PIVOT_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-9;

pub fn lp_oracle(a: &DenseMatrix, b: &[f64], norm: Norm) -> Result<f64> {
    lp_oracle_with_budget(a, b, norm, DEFAULT_ENUMERATION_BUDGET)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn lp_oracle_with_budget(a: &DenseMatrix, b: &[f64], norm: Norm, budget: u128) -> Result<f64> {
    check_len("b", b.len(), a.n_rows())?;
    let m = a.n_cols();
    if m > MAX_ORACLE_COLUMNS {
        return Err(Error::TooLarge {
            bases: binomial(2 * m, m),
            budget,
        });
    }
    let (eq, rhs) = row_basis(a, b)?;
    let rank = eq.len();
    let d = match norm {
        Norm::Linf => m + 1,
        Norm::L1 => 2 * m,
    };
    let n_ineq = 2 * m;
    let active = d - rank;
    let bases = binomial(n_ineq, active);
    if bases > budget {
        return Err(Error::TooLarge { bases, budget });
    }

    // Inequality k: sign * x_i - (t or u_i) <= 0 with i = k / 2.
    let ineq_row = |k: usize| -> Vec<f64> {
        let i = k / 2;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let mut row = vec![0.0; d];
        row[i] = sign;
        match norm {
            Norm::Linf => row[m] = -1.0,
            Norm::L1 => row[m + i] = -1.0,
        }
        row
    };
    let objective = |z: &[f64]| match norm {
        Norm::Linf => z[m],
        Norm::L1 => z[m..].iter().sum::<f64>(),
    };

    let mut best: Option<f64> = None;
    let mut sys = vec![0.0; d * (d + 1)];
    for subset in (0..n_ineq).combinations(active) {
        for (r, row) in eq.iter().enumerate() {
            sys[r * (d + 1)..r * (d + 1) + m].copy_from_slice(row);
            sys[r * (d + 1) + m..(r + 1) * (d + 1) - 1].fill(0.0);
            sys[(r + 1) * (d + 1) - 1] = rhs[r];
        }
        for (j, &k) in subset.iter().enumerate() {
            let r = rank + j;
            sys[r * (d + 1)..(r + 1) * (d + 1) - 1].copy_from_slice(&ineq_row(k));
            sys[(r + 1) * (d + 1) - 1] = 0.0;
        }
        let Some(z) = solve_square(&mut sys, d) else {
            continue;
        };
        let scale = 1.0 + z.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let feasible = (0..n_ineq).all(|k| {
            let row = ineq_row(k);
            row.iter().zip(&z).map(|(r, v)| r * v).sum::<f64>() <= FEAS_TOL * scale
        });
        if !feasible {
            continue;
        }
        let val = objective(&z);
        if best.is_none_or(|b| val < b) {
            best = Some(val);
        }
    }
    best.map(|v| v.max(0.0)).ok_or(Error::Infeasible)
}

/// Independent rows of `[A | b]` by Gaussian elimination with partial
/// pivoting. Fails with [`Error::Infeasible`] if the system is inconsistent.
fn row_basis(a: &DenseMatrix, b: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let n = a.n_rows();
    let m = a.n_cols();
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i]);
            r
        })
        .collect();
    let scale = a.as_slice().iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    let mut rank = 0;
    for col in 0..m {
        let Some(p) = (rank..n).max_by(|&i, &j| rows[i][col].abs().total_cmp(&rows[j][col].abs()))
        else {
            break;
        };
        if rows[p][col].abs() <= PIVOT_TOL * scale {
            continue;
        }
        rows.swap(rank, p);
        for i in 0..n {
            if i != rank {
                let f = rows[i][col] / rows[rank][col];
                if f != 0.0 {
                    for j in col..=m {
                        rows[i][j] -= f * rows[rank][j];
                    }
                }
            }
        }
        rank += 1;
    }
    let b_scale = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    if rows[rank..].iter().any(|r| r[m].abs() > 1e-9 * b_scale) {
        return Err(Error::Infeasible);
    }
    rows.truncate(rank);
    let rhs = rows.iter_mut().map(|r| r.pop().unwrap_or(0.0)).collect();
    Ok((rows, rhs))
}

/// Solves the `d x d` system stored row-major with the right-hand side as
/// column `d`. `None` if singular.
fn solve_square(sys: &mut [f64], d: usize) -> Option<Vec<f64>> {
    let w = d + 1;
    for col in 0..d {
        let p = (col..d).max_by(|&i, &j| sys[i * w + col].abs().total_cmp(&sys[j * w + col].abs()))?;
        if sys[p * w + col].abs() <= PIVOT_TOL {
            return None;
        }
        if p != col {
            for j in 0..w {
                sys.swap(p * w + j, col * w + j);
            }
        }
        let piv = sys[col * w + col];
        for i in col + 1..d {
            let f = sys[i * w + col] / piv;
            if f != 0.0 {
                for j in col..w {
                    sys[i * w + j] -= f * sys[col * w + j];
                }
            }
        }
    }
    let mut z = vec![0.0; d];
    for i in (0..d).rev() {
        let mut s = sys[i * w + d];
        for j in i + 1..d {
            s -= sys[i * w + j] * z[j];
        }
        z[i] = s / sys[i * w + i];
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_variable() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert_relative_eq!(lp_oracle(&a, &[1.0], Norm::Linf).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(lp_oracle(&a, &[1.0], Norm::L1).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn path_graph() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.0],
            vec![-1.0, 1.0],
            vec![0.0, -1.0],
        ])
        .unwrap();
        assert_relative_eq!(
            lp_oracle(&a, &[1.0, 0.0, -1.0], Norm::Linf).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert!(matches!(
            lp_oracle(&a, &[1.0, 0.0, 0.0], Norm::Linf),
            Err(Error::Infeasible)
        ));
    }

    #[test]
    fn identity_has_unique_point() {
        let a = DenseMatrix::identity(2);
        assert_relative_eq!(lp_oracle(&a, &[3.0, -4.0], Norm::Linf).unwrap(), 4.0, epsilon = 1e-12);
        assert_relative_eq!(lp_oracle(&a, &[3.0, -4.0], Norm::L1).unwrap(), 7.0, epsilon = 1e-12);
    }

    #[test]
    fn too_large() {
        let a = DenseMatrix::new(1, 13, vec![1.0; 13]).unwrap();
        assert!(matches!(
            lp_oracle(&a, &[1.0], Norm::Linf),
            Err(Error::TooLarge { .. })
        ));
        let a = DenseMatrix::new(1, 4, vec![1.0; 4]).unwrap();
        assert!(matches!(
            lp_oracle_with_budget(&a, &[1.0], Norm::Linf, 3),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(24, 12), 2_704_156);
        assert_eq!(binomial(3, 5), 0);
    }
}
