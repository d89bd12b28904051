//! Decision solver for `min ||x||_inf s.t. Ax = b`.
//!
//! Given a target `M`, the solver maintains resistances `r` (starting at
//! `1/m`) and repeatedly solves the weighted least-squares problem
//! `min <r, x^2>`. Coordinates whose flow reaches `(1+eps) M` get their
//! resistance multiplied by `x_i^2 / M^2`; every such update raises the
//! electrical energy by at least `M^2` per unit of added resistance. Once
//! `||r||_1` passes the budget `1/eps`, the normalized resistances certify
//! `OPT >= (1-eps) M`. Meanwhile a running average of the iterates with
//! `||x||_inf <= rho M` is kept, and returned as soon as it is itself a
//! `(1+eps) M` solution.

use crate::electrical::electrical_energy;
use crate::error::{check_len, Error, Result};
use crate::linalg::{
    norm1, norm_inf, solve_with_conductances, DenseMatrix, ElectricalSolution, SolveOptions,
    WeightVector,
};
use crate::params;
use crate::trace::{Decision, IterationRecord, IterationTrace, StepMode};

/// Hard cap on the exponent of a long step.
pub const MAX_LONG_STEP_EXPONENT: u32 = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct LinfConfig {
    pub eps: f64,
    pub target: f64,
    pub step_mode: StepMode,
    /// `rho`; iterates with `||x||_inf <= rho M` enter the average. Defaults to `m^(1/3)`.
    pub averaging_threshold: Option<f64>,
    /// The loop runs while `||r||_1 <= budget`. Defaults to `1/eps`.
    pub budget: Option<f64>,
    pub max_iterations: Option<usize>,
    /// Initial resistances; rescaled to `||r||_1 = 1`.
    pub warm_start: Option<WeightVector>,
    pub solve: SolveOptions,
}

impl LinfConfig {
    pub fn new(eps: f64, target: f64) -> Result<Self> {
        let cfg = Self {
            eps,
            target,
            step_mode: StepMode::Short,
            averaging_threshold: None,
            budget: None,
            max_iterations: None,
            warm_start: None,
            solve: SolveOptions::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_step_mode(mut self, step_mode: StepMode) -> Self {
        self.step_mode = step_mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        params::validate(self.eps, self.target, self.averaging_threshold, self.budget)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinfOutcome {
    /// `Ax = b` and `||x||_inf <= (1+eps) M`.
    Feasible { x: Vec<f64>, linf_norm: f64 },
    /// `r_simplex` sums to one and its electrical energy is at least
    /// `(1-eps)^2 M^2`, so every feasible `x` has `||x||_inf >= sqrt(energy_lb)`.
    Infeasible {
        r_simplex: WeightVector,
        energy_lb: f64,
    },
}

impl LinfOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LinfOutcome::Feasible { .. })
    }
}

/// Thresholded update factors: `1` where `|x_i| < (1+eps) M`, else `x_i^2 / M^2`.
pub fn linf_update_factors(x: &[f64], target: f64, eps: f64) -> Vec<f64> {
    let threshold = (1.0 + eps) * target;
    let m2 = target * target;
    x.iter()
        .map(|&xi| {
            if xi.abs() < threshold {
                1.0
            } else {
                xi * xi / m2
            }
        })
        .collect()
}

fn solve_resistances(
    a: &DenseMatrix,
    b: &[f64],
    r: &[f64],
    opts: &SolveOptions,
) -> Result<ElectricalSolution> {
    let c: Vec<f64> = r.iter().map(|v| 1.0 / v).collect();
    solve_with_conductances(a, b, &c, opts)
}

fn finite_weights(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite() && *x > 0.0) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "weights overflowed; the target is far below the optimum scale".into(),
        ))
    }
}

struct LongStep {
    weights: Vec<f64>,
    exponent: u32,
    guard_solves: usize,
    solution: Option<ElectricalSolution>,
}

/// Applies `alpha^(2^k)` for the largest `k` (up to the cap) whose exact
/// energy increase still meets `ratio >= M^2`. Stops probing once the
/// accepted weights leave the budget, since the run ends there anyway.
fn long_step(
    a: &DenseMatrix,
    b: &[f64],
    r: &[f64],
    alpha: &[f64],
    target: f64,
    energy: f64,
    budget: f64,
    opts: &SolveOptions,
) -> LongStep {
    let m2 = target * target;
    let mut best = LongStep {
        weights: r.iter().zip(alpha).map(|(ri, ai)| ri * ai).collect(),
        exponent: 0,
        guard_solves: 0,
        solution: None,
    };
    let mut factors = alpha.to_vec();
    for k in 1..=MAX_LONG_STEP_EXPONENT {
        if norm1(&best.weights) > budget {
            break;
        }
        for f in factors.iter_mut() {
            *f *= *f;
        }
        let candidate: Vec<f64> = r.iter().zip(&factors).map(|(ri, fi)| ri * fi).collect();
        if candidate.iter().any(|v| !v.is_finite()) {
            break;
        }
        let Ok(sol) = solve_resistances(a, b, &candidate, opts) else {
            break;
        };
        best.guard_solves += 1;
        let added: f64 = candidate.iter().zip(r).map(|(c, o)| c - o).sum();
        if (sol.energy - energy) / added >= m2 {
            best.weights = candidate;
            best.exponent = k;
            best.solution = Some(sol);
        } else {
            break;
        }
    }
    best
}

/// Long-step resistance update for resistances `r` with optimal flow `x`.
///
/// Returns `r * alpha^(2^k)` with `alpha = linf_update_factors(x, M, eps)`
/// and `k >= 0` the largest exponent (at most 30) for which the recomputed
/// energy still satisfies `(E_new - E_old) / ||r_new - r||_1 >= M^2`.
pub fn long_step_update(
    r: &WeightVector,
    x: &[f64],
    target: f64,
    eps: f64,
    a: &DenseMatrix,
    b: &[f64],
    opts: &SolveOptions,
) -> Result<WeightVector> {
    check_len("flow", x.len(), r.len())?;
    check_len("weights", r.len(), a.n_cols())?;
    let rv = r.resistances_vec();
    let alpha = linf_update_factors(x, target, eps);
    if alpha.iter().all(|&v| v == 1.0) {
        return Ok(r.clone());
    }
    let energy: f64 = rv.iter().zip(x).map(|(ri, xi)| ri * xi * xi).sum();
    let step = long_step(a, b, &rv, &alpha, target, energy, f64::INFINITY, opts);
    finite_weights(&step.weights)?;
    WeightVector::resistances(step.weights)
}

/// Runs the decision procedure for target `cfg.target` and accuracy `cfg.eps`.
pub fn linf_decide(a: &DenseMatrix, b: &[f64], cfg: &LinfConfig) -> Result<Decision<LinfOutcome>> {
    cfg.validate()?;
    check_len("b", b.len(), a.n_rows())?;
    let m = a.n_cols();
    let eps = cfg.eps;
    let target = cfg.target;
    let rho = cfg
        .averaging_threshold
        .unwrap_or_else(|| params::default_averaging_threshold(m));
    let budget = cfg.budget.unwrap_or(1.0 / eps);
    let cap = cfg
        .max_iterations
        .unwrap_or_else(|| params::default_max_iterations(m, eps));
    let opts = &cfg.solve;
    let mut trace = IterationTrace::new(target * target);

    let mut r: Vec<f64> = match &cfg.warm_start {
        Some(w) => {
            check_len("warm start", w.len(), m)?;
            w.normalized().resistances_vec()
        }
        None => vec![1.0 / m as f64; m],
    };

    if b.iter().all(|&v| v == 0.0) {
        return Ok(Decision {
            outcome: LinfOutcome::Feasible {
                x: vec![0.0; m],
                linf_norm: 0.0,
            },
            trace,
            final_weights: WeightVector::resistances(r)?,
        });
    }

    let threshold = (1.0 + eps) * target;
    let mut running_sum = vec![0.0; m];
    let mut averaged_count = 0usize;
    let mut cached: Option<ElectricalSolution> = None;
    // weight increase of the last update, waiting for the next energy
    let mut pending: Option<f64> = None;

    while norm1(&r) <= budget {
        if trace.records.len() >= cap {
            return Err(Error::IterationCapExceeded(cap));
        }
        let sol = match cached.take() {
            Some(s) => s,
            None => solve_resistances(a, b, &r, opts)?,
        };
        close_pending(&mut trace, &mut pending, sol.energy);
        let x = &sol.flow;
        let mut record = IterationRecord {
            weight_norm1: norm1(&r),
            energy: sol.energy,
            invariant_ratio: None,
            increased: 0,
            max_alpha: 1.0,
            averaged: false,
            step_exponent: 0,
            guard_solves: 0,
        };

        if norm_inf(x) <= rho * target {
            record.averaged = true;
            averaged_count += 1;
            for (s, xi) in running_sum.iter_mut().zip(x) {
                *s += xi;
            }
            if norm_inf(&running_sum) / averaged_count as f64 <= threshold {
                let k = averaged_count as f64;
                let avg: Vec<f64> = running_sum.iter().map(|s| s / k).collect();
                trace.records.push(record);
                return Ok(Decision {
                    outcome: LinfOutcome::Feasible {
                        linf_norm: norm_inf(&avg),
                        x: avg,
                    },
                    trace,
                    final_weights: WeightVector::resistances(r)?,
                });
            }
        }

        let alpha = linf_update_factors(x, target, eps);
        record.increased = alpha.iter().filter(|&&v| v > 1.0).count();
        record.max_alpha = alpha.iter().copied().fold(1.0, f64::max);
        if record.increased == 0 {
            trace.records.push(record);
            return Ok(Decision {
                outcome: LinfOutcome::Feasible {
                    linf_norm: norm_inf(x),
                    x: sol.flow,
                },
                trace,
                final_weights: WeightVector::resistances(r)?,
            });
        }

        let next = match cfg.step_mode {
            StepMode::Short => r.iter().zip(&alpha).map(|(ri, ai)| ri * ai).collect(),
            StepMode::Long => {
                let step = long_step(a, b, &r, &alpha, target, sol.energy, budget, opts);
                record.step_exponent = step.exponent;
                record.guard_solves = step.guard_solves;
                cached = step.solution;
                step.weights
            }
        };
        finite_weights(&next)?;
        pending = Some(next.iter().zip(&r).map(|(n, o)| n - o).sum());
        trace.records.push(record);
        r = next;
    }

    // Budget exhausted: the normalized resistances are the certificate.
    let total = norm1(&r);
    let final_energy = match cached.take() {
        Some(s) => s.energy,
        None => solve_resistances(a, b, &r, opts)?.energy,
    };
    close_pending(&mut trace, &mut pending, final_energy);
    let final_weights = WeightVector::resistances(r)?;
    Ok(Decision {
        outcome: LinfOutcome::Infeasible {
            r_simplex: final_weights.normalized(),
            energy_lb: final_energy / total,
        },
        trace,
        final_weights,
    })
}

fn close_pending(trace: &mut IterationTrace, pending: &mut Option<f64>, energy: f64) {
    if let Some(added) = pending.take() {
        if let Some(last) = trace.records.last_mut() {
            last.invariant_ratio = Some((energy - last.energy) / added);
        }
    }
}

/// Checks that `r_simplex` (summing to one) has electrical energy at least
/// `(1-eps)^2 M^2`, which certifies `min ||x||_inf >= (1-eps) M`.
pub fn verify_linf_certificate(
    a: &DenseMatrix,
    b: &[f64],
    r_simplex: &WeightVector,
    target: f64,
    eps: f64,
    opts: &SolveOptions,
) -> Result<bool> {
    let total = r_simplex.norm1();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "certificate must sum to one, sums to {total}"
        )));
    }
    let energy = electrical_energy(a, b, r_simplex, opts)?;
    Ok(energy >= (1.0 - eps) * (1.0 - eps) * target * target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_var() -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn update_factor_examples() {
        assert_eq!(linf_update_factors(&[2.0, 0.5, 1.05], 1.0, 0.1), vec![4.0, 1.0, 1.0]);
        assert_eq!(linf_update_factors(&[0.0, 0.0], 1.0, 0.1), vec![1.0, 1.0]);
        let a = linf_update_factors(&[1.2], 1.0, 0.1);
        assert_relative_eq!(a[0], 1.44, epsilon = 1e-15);
        // the threshold itself takes the update branch
        let a = linf_update_factors(&[-1.1], 1.0, 0.1);
        assert!(a[0] > 1.0);
    }

    #[test]
    fn two_variable_feasible() {
        let cfg = LinfConfig::new(0.1, 0.6).unwrap();
        let d = linf_decide(&two_var(), &[1.0], &cfg).unwrap();
        match d.outcome {
            LinfOutcome::Feasible { x, linf_norm } => {
                assert!(linf_norm <= 0.66);
                assert_relative_eq!(x[0] + x[1], 1.0, epsilon = 1e-12);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn two_variable_infeasible() {
        let cfg = LinfConfig::new(0.1, 0.4).unwrap();
        let d = linf_decide(&two_var(), &[1.0], &cfg).unwrap();
        match &d.outcome {
            LinfOutcome::Infeasible {
                r_simplex,
                energy_lb,
            } => {
                assert_relative_eq!(r_simplex.norm1(), 1.0, epsilon = 1e-12);
                assert_relative_eq!(*energy_lb, 0.25, epsilon = 1e-12);
                assert!(verify_linf_certificate(
                    &two_var(),
                    &[1.0],
                    r_simplex,
                    0.4,
                    0.1,
                    &SolveOptions::default()
                )
                .unwrap());
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
        assert!(d.trace.min_invariant_margin().unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn certificate_examples() {
        let r = WeightVector::resistances(vec![0.5, 0.5]).unwrap();
        let o = SolveOptions::default();
        assert!(verify_linf_certificate(&two_var(), &[1.0], &r, 0.4, 0.1, &o).unwrap());
        assert!(!verify_linf_certificate(&two_var(), &[1.0], &r, 0.6, 0.1, &o).unwrap());
        let not_simplex = WeightVector::resistances(vec![1.0, 1.0]).unwrap();
        assert!(verify_linf_certificate(&two_var(), &[1.0], &not_simplex, 0.4, 0.1, &o).is_err());
    }

    #[test]
    fn zero_demand_is_trivially_feasible() {
        let cfg = LinfConfig::new(0.1, 1.0).unwrap();
        let d = linf_decide(&two_var(), &[0.0], &cfg).unwrap();
        assert_eq!(
            d.outcome,
            LinfOutcome::Feasible {
                x: vec![0.0, 0.0],
                linf_norm: 0.0
            }
        );
    }

    #[test]
    fn long_step_identity_when_nothing_to_update() {
        let r = WeightVector::resistances(vec![0.5, 0.5]).unwrap();
        let out = long_step_update(
            &r,
            &[0.5, 0.5],
            1.0,
            0.1,
            &two_var(),
            &[1.0],
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(out, r);
    }

    #[test]
    fn long_step_keeps_ratio() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, -1.0, 0.5], vec![0.0, 1.0, 1.0, -2.0]])
            .unwrap();
        let b = [1.0, 3.0];
        let o = SolveOptions::default();
        let r = WeightVector::uniform(4, crate::linalg::WeightRole::Resistances).unwrap();
        let sol = crate::linalg::weighted_least_squares(&a, &b, &r, &o).unwrap();
        let target = 0.5 * norm_inf(&sol.flow);
        let out = long_step_update(&r, &sol.flow, target, 0.1, &a, &b, &o).unwrap();
        let e_new = electrical_energy(&a, &b, &out, &o).unwrap();
        let added = out.norm1() - r.norm1();
        assert!(added > 0.0);
        assert!((e_new - sol.energy) / added >= target * target * (1.0 - 1e-9));
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(LinfConfig::new(0.6, 1.0).is_err());
        assert!(LinfConfig::new(0.1, -1.0).is_err());
    }
}
