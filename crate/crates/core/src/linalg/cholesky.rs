use super::DenseMatrix;

/// `P^T L P = G G^T` with symmetric diagonal pivoting.
///
/// Only full-rank factorizations are kept: [`PivotedCholesky::factor`]
/// returns `None` as soon as the largest remaining pivot drops below
/// `rank_tol` times the largest diagonal entry, and the caller falls back to
/// the eigendecomposition.
pub(crate) struct PivotedCholesky {
    n: usize,
    // lower triangle of G, row-major n x n
    g: Vec<f64>,
    perm: Vec<usize>,
}

impl PivotedCholesky {
    pub(crate) fn factor(l: &DenseMatrix, rank_tol: f64) -> Option<Self> {
        let n = l.n_rows();
        let mut a = l.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let max_diag = (0..n).map(|i| a[i * n + i]).fold(0.0f64, f64::max);
        if !(max_diag > 0.0) {
            return None;
        }
        let cutoff = rank_tol * max_diag;
        let mut col = vec![0.0; n];

        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]))
                .expect("non-empty range");
            let pivot = a[p * n + p];
            if !(pivot > cutoff) {
                return None;
            }
            if p != k {
                swap_symmetric(&mut a, n, k, p);
                perm.swap(k, p);
            }
            let d = pivot.sqrt();
            a[k * n + k] = d;
            for i in k + 1..n {
                a[i * n + k] /= d;
                col[i] = a[i * n + k];
            }
            for i in k + 1..n {
                let lik = col[i];
                if lik == 0.0 {
                    continue;
                }
                let row = &mut a[i * n + k + 1..=i * n + i];
                for (x, c) in row.iter_mut().zip(&col[k + 1..=i]) {
                    *x -= lik * c;
                }
            }
        }
        Some(Self { n, g: a, perm })
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let g = &self.g;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= g[i * n + j] * y[j];
            }
            y[i] = s / g[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= g[j * n + i] * y[j];
            }
            y[i] = s / g[i * n + i];
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }
}

// Symmetric swap of indices k < p; only the lower triangle is meaningful.
fn swap_symmetric(a: &mut [f64], n: usize, k: usize, p: usize) {
    a.swap(k * n + k, p * n + p);
    for j in 0..k {
        a.swap(k * n + j, p * n + j);
    }
    for i in k + 1..p {
        a.swap(i * n + k, p * n + i);
    }
    for i in p + 1..n {
        a.swap(i * n + k, i * n + p);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_spd_system() {
        let l = DenseMatrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 9.0, 2.0],
            vec![0.5, 2.0, 3.0],
        ])
        .unwrap();
        let f = PivotedCholesky::factor(&l, 1e-12).unwrap();
        let b = [1.0, -2.0, 0.25];
        let x = f.solve(&b);
        let r = l.mul_vec(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-13);
        }
    }

    #[test]
    fn pivoting_with_interior_swap() {
        // forces a pivot swap across an intermediate index
        let l = DenseMatrix::from_rows(&[
            vec![1.0, 0.2, 0.3, 0.1],
            vec![0.2, 2.0, 0.4, 0.5],
            vec![0.3, 0.4, 3.0, 0.6],
            vec![0.1, 0.5, 0.6, 5.0],
        ])
        .unwrap();
        let f = PivotedCholesky::factor(&l, 1e-12).unwrap();
        let b = [1.0, 2.0, -1.0, 0.5];
        let r = l.mul_vec(&f.solve(&b));
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-13);
        }
    }

    #[test]
    fn detects_rank_deficiency() {
        let l = DenseMatrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert!(PivotedCholesky::factor(&l, 1e-12).is_none());
        let z = DenseMatrix::from_rows(&[vec![0.0]]).unwrap();
        assert!(PivotedCholesky::factor(&z, 1e-12).is_none());
    }
}
