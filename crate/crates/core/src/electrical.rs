//! Electrical energy and its perturbation bounds.
//!
//! With resistances `r`, the energy of a flow `x` is `<r, x^2>` and the
//! electrical energy of a demand `b` is the minimum of that over all `x` with
//! `Ax = b`. It has three equivalent forms:
//!
//! * `b^T (A diag(1/r) A^T)^+ b`,
//! * `max_phi 2 b^T phi - sum_i (A^T phi)_i^2 / r_i`,
//! * `1 / min_{b^T phi = 1} sum_i (A^T phi)_i^2 / r_i`,
//!
//! and raising resistances (or conductances) admits cheap certified lower
//! bounds on the new energy (or inverse energy) computed from the old
//! solution alone. The solvers use the bounds to pick their updates; the
//! tests use them as oracles.

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, weighted_least_squares, DenseMatrix, SolveOptions, WeightVector};

/// `<r, x^2>`.
pub fn energy_of_flow(r: &WeightVector, x: &[f64]) -> Result<f64> {
    check_len("flow", x.len(), r.len())?;
    let r = r.resistances_vec();
    Ok(r.iter().zip(x).map(|(ri, xi)| ri * xi * xi).sum())
}

/// `b^T (A diag(1/r) A^T)^+ b`, the minimum energy of a flow routing `b`.
pub fn electrical_energy(
    a: &DenseMatrix,
    b: &[f64],
    r: &WeightVector,
    opts: &SolveOptions,
) -> Result<f64> {
    Ok(weighted_least_squares(a, b, r, opts)?.energy)
}

/// `2 b^T phi - sum_i (A^T phi)_i^2 / r_i`.
///
/// Never exceeds the electrical energy; equal to it at the optimal
/// potentials.
pub fn dual_energy_value(a: &DenseMatrix, b: &[f64], r: &WeightVector, phi: &[f64]) -> Result<f64> {
    check_len("b", b.len(), a.n_rows())?;
    check_len("phi", phi.len(), a.n_rows())?;
    check_len("weights", r.len(), a.n_cols())?;
    let atphi = a.tr_mul_vec(phi);
    let c = r.conductances_vec();
    let quad: f64 = atphi.iter().zip(&c).map(|(g, ci)| g * g * ci).sum();
    Ok(2.0 * dot(b, phi) - quad)
}

/// `sum_i (A^T phi)_i^2 / r_i` restricted to `b^T phi = 1`: the quantity whose
/// minimum is the inverse energy. `phi` is rescaled so that `b^T phi = 1`;
/// returns `None` when `b^T phi = 0`.
pub fn normalized_potential_quadratic(
    a: &DenseMatrix,
    b: &[f64],
    r: &WeightVector,
    phi: &[f64],
) -> Result<Option<f64>> {
    check_len("b", b.len(), a.n_rows())?;
    check_len("phi", phi.len(), a.n_rows())?;
    check_len("weights", r.len(), a.n_cols())?;
    let scale = dot(b, phi);
    if scale == 0.0 {
        return Ok(None);
    }
    let atphi = a.tr_mul_vec(phi);
    let c = r.conductances_vec();
    Ok(Some(
        atphi
            .iter()
            .zip(&c)
            .map(|(g, ci)| {
                let g = g / scale;
                g * g * ci
            })
            .sum(),
    ))
}

fn check_monotone(old: &[f64], new: &[f64]) -> Result<()> {
    check_len("new weights", new.len(), old.len())?;
    for (i, (&o, &n)) in old.iter().zip(new).enumerate() {
        if n < o {
            return Err(Error::NonMonotone {
                index: i,
                old: o,
                new: n,
            });
        }
    }
    Ok(())
}

/// Lower bound on the electrical energy after raising resistances from `r`
/// to `r_new`, given the optimal flow `x` for `r`:
/// `<r, x^2> + sum_i r_i x_i^2 (1 - r_i / r'_i)`.
pub fn energy_increase_lower_bound(r: &WeightVector, r_new: &WeightVector, x: &[f64]) -> Result<f64> {
    let old = r.resistances_vec();
    let new = r_new.resistances_vec();
    check_monotone(&old, &new)?;
    check_len("flow", x.len(), old.len())?;
    let mut base = 0.0;
    let mut gain = 0.0;
    for ((ri, rn), xi) in old.iter().zip(&new).zip(x) {
        let e = ri * xi * xi;
        base += e;
        gain += e * (1.0 - ri / rn);
    }
    Ok(base + gain)
}

/// Lower bound on the inverse energy after raising conductances from `c` to
/// `c_new`, given the optimal potentials `phi` for `c` and the energy
/// `energy = E_{1/c}(b)`:
/// `1/E + (1/E^2) sum_i c_i (A^T phi)_i^2 (1 - c_i / c'_i)`.
///
/// `phi` is the unnormalized potential vector `(A diag(c) A^T)^+ b`, for
/// which `b^T phi = E`. The energy is passed in rather than recomputed, so
/// this is a pure formula with no linear solve.
pub fn inverse_energy_increase_lower_bound(
    a: &DenseMatrix,
    c: &WeightVector,
    c_new: &WeightVector,
    phi: &[f64],
    energy: f64,
) -> Result<f64> {
    check_len("phi", phi.len(), a.n_rows())?;
    check_len("weights", c.len(), a.n_cols())?;
    inverse_energy_bound_from_gradient(c, c_new, &a.tr_mul_vec(phi), energy)
}

/// [`inverse_energy_increase_lower_bound`] with `A^T phi` precomputed.
pub(crate) fn inverse_energy_bound_from_gradient(
    c: &WeightVector,
    c_new: &WeightVector,
    at_phi: &[f64],
    energy: f64,
) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "energy must be positive, got {energy}"
        )));
    }
    let old = c.conductances_vec();
    let new = c_new.conductances_vec();
    check_monotone(&old, &new)?;
    check_len("A^T phi", at_phi.len(), old.len())?;
    let gain: f64 = old
        .iter()
        .zip(&new)
        .zip(at_phi)
        .map(|((ci, cn), g)| ci * g * g * (1.0 - ci / cn))
        .sum();
    Ok(1.0 / energy + gain / (energy * energy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn res(v: &[f64]) -> WeightVector {
        WeightVector::resistances(v.to_vec()).unwrap()
    }

    fn cond(v: &[f64]) -> WeightVector {
        WeightVector::conductances(v.to_vec()).unwrap()
    }

    fn two_var() -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn energy_of_flow_examples() {
        assert_relative_eq!(energy_of_flow(&res(&[1.0, 1.0]), &[0.5, 0.5]).unwrap(), 0.5);
        assert_relative_eq!(energy_of_flow(&res(&[1.0, 3.0]), &[0.75, 0.25]).unwrap(), 0.75);
        assert_eq!(energy_of_flow(&res(&[2.0, 5.0]), &[0.0, 0.0]).unwrap(), 0.0);
        assert!(energy_of_flow(&res(&[1.0]), &[1.0, 2.0]).is_err());
    }

    #[test]
    fn electrical_energy_examples() {
        let o = SolveOptions::default();
        let a = two_var();
        assert_relative_eq!(
            electrical_energy(&a, &[1.0], &res(&[1.0, 1.0]), &o).unwrap(),
            0.5,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            electrical_energy(&a, &[1.0], &res(&[1.0, 3.0]), &o).unwrap(),
            0.75,
            epsilon = 1e-14
        );
        let a = DenseMatrix::identity(2);
        assert_relative_eq!(
            electrical_energy(&a, &[1.0, 2.0], &res(&[2.0, 1.0]), &o).unwrap(),
            6.0,
            epsilon = 1e-13
        );
    }

    #[test]
    fn energy_bound_examples() {
        let lb = energy_increase_lower_bound(&res(&[1.0, 1.0]), &res(&[2.0, 1.0]), &[0.5, 0.5])
            .unwrap();
        assert_relative_eq!(lb, 0.625, epsilon = 1e-15);
        let truth = electrical_energy(
            &two_var(),
            &[1.0],
            &res(&[2.0, 1.0]),
            &SolveOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(truth, 2.0 / 3.0, epsilon = 1e-14);
        assert!(lb <= truth);

        let same = energy_increase_lower_bound(&res(&[1.0, 3.0]), &res(&[1.0, 3.0]), &[0.75, 0.25])
            .unwrap();
        assert_relative_eq!(same, 0.75, epsilon = 1e-15);
    }

    #[test]
    fn energy_bound_rejects_decrease() {
        let err = energy_increase_lower_bound(&res(&[1.0, 1.0]), &res(&[0.5, 1.0]), &[0.5, 0.5]);
        assert!(matches!(err, Err(Error::NonMonotone { index: 0, .. })));
    }

    #[test]
    fn inverse_bound_examples() {
        // A = [1 1], b = 1, c = (1,1): phi = 0.5, A^T phi = (0.5, 0.5), E = 0.5.
        let lb = inverse_energy_increase_lower_bound(
            &two_var(),
            &cond(&[1.0, 1.0]),
            &cond(&[2.0, 1.0]),
            &[0.5],
            0.5,
        )
        .unwrap();
        assert_relative_eq!(lb, 2.5, epsilon = 1e-14);
        // c_new = (2,1): E' = 1/3
        let truth = 1.0
            / electrical_energy(
                &two_var(),
                &[1.0],
                &cond(&[2.0, 1.0]),
                &SolveOptions::default(),
            )
            .unwrap();
        assert_relative_eq!(truth, 3.0, epsilon = 1e-13);
        assert!(lb <= truth);

        let same = inverse_energy_increase_lower_bound(
            &two_var(),
            &cond(&[1.0, 1.0]),
            &cond(&[1.0, 1.0]),
            &[0.5],
            0.5,
        )
        .unwrap();
        assert_relative_eq!(same, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn inverse_bound_errors() {
        let a = DenseMatrix::identity(1);
        assert!(matches!(
            inverse_energy_increase_lower_bound(&a, &cond(&[1.0]), &cond(&[0.5]), &[1.0], 1.0),
            Err(Error::NonMonotone { .. })
        ));
        assert!(
            inverse_energy_increase_lower_bound(&a, &cond(&[1.0]), &cond(&[1.0]), &[1.0], 0.0)
                .is_err()
        );
    }

    #[test]
    fn dual_value_examples() {
        let a = two_var();
        let r = res(&[1.0, 1.0]);
        assert_relative_eq!(dual_energy_value(&a, &[1.0], &r, &[0.5]).unwrap(), 0.5);
        assert_eq!(dual_energy_value(&a, &[1.0], &r, &[0.0]).unwrap(), 0.0);
        // suboptimal potentials stay below the energy
        assert!(dual_energy_value(&a, &[1.0], &r, &[0.9]).unwrap() < 0.5);
    }
}
