//! Parameter defaults and validation shared by the two decision solvers.

use crate::error::{Error, Result};

/// `m^(1/3)`, the averaging threshold of the plain (unphased) solvers.
pub fn default_averaging_threshold(m: usize) -> f64 {
    (m as f64).cbrt()
}

/// Safety cap on iterations: roughly two orders of magnitude above the
/// proven iteration bound, plus a constant.
pub fn default_max_iterations(m: usize, eps: f64) -> usize {
    let m = m as f64;
    let inv = 1.0 / eps;
    let cap = 100.0 * (m.cbrt() * inv.ln() / eps.powf(2.0 / 3.0) + m.ln() / (eps * eps)) + 1e4;
    if cap >= usize::MAX as f64 {
        usize::MAX
    } else {
        cap.ceil() as usize
    }
}

/// Iteration count the counting argument guarantees for threshold `rho`:
/// `10 (rho log(1/eps)/eps + log(m/eps)/eps^2 + m/rho^2 log(1/eps))`.
pub fn iteration_bound(m: usize, eps: f64, rho: f64) -> f64 {
    let m = m as f64;
    let l = (1.0 / eps).ln();
    10.0 * (rho * l / eps + (m / eps).ln() / (eps * eps) + m / (rho * rho) * l)
}

pub(crate) fn validate(eps: f64, target: f64, rho: Option<f64>, budget: Option<f64>) -> Result<()> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "eps must lie in (0, 1/2], got {eps}"
        )));
    }
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "target must be positive and finite, got {target}"
        )));
    }
    if let Some(rho) = rho {
        if !(rho >= 1.0 && rho.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "averaging threshold must be >= 1, got {rho}"
            )));
        }
    }
    if let Some(b) = budget {
        if !(b > 1.0 && b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "weight budget must exceed 1, got {b}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(validate(0.1, 1.0, None, None).is_ok());
        assert!(validate(0.5, 1.0, Some(1.0), Some(1.5)).is_ok());
        assert!(validate(0.0, 1.0, None, None).is_err());
        assert!(validate(0.51, 1.0, None, None).is_err());
        assert!(validate(0.1, 0.0, None, None).is_err());
        assert!(validate(0.1, 1.0, Some(0.5), None).is_err());
        assert!(validate(0.1, 1.0, None, Some(1.0)).is_err());
    }

    #[test]
    fn caps_exceed_bound() {
        for &m in &[2usize, 8, 200, 2000] {
            for &eps in &[0.5, 0.1, 0.01] {
                let rho = default_averaging_threshold(m);
                assert!(default_max_iterations(m, eps) as f64 >= iteration_bound(m, eps, rho));
            }
        }
    }
}
