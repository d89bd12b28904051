//! Decision solver for `min ||x||_1 s.t. Ax = b`.
//!
//! Works over conductances `c` (starting at `1/m`). Each iteration computes
//! potentials `phi = (A diag(c) A^T)^+ b` and the normalized gradient
//! `g = A^T phi / b^T phi`. Coordinates with `|g_i| > 1/((1-eps) M)` get
//! their conductance multiplied by `g_i^2 M^2`, which raises the inverse
//! energy by at least `1/M^2` per unit of added conductance. Once `||c||_1`
//! passes the budget, `x = diag(c) A^T phi` is a `(1+eps) M` solution. The
//! dual side averages the normalized potentials and returns them as soon as
//! they certify `OPT >= (1-eps) M`.

use crate::error::{check_len, Error, Result};
use crate::linalg::{
    dot, norm1, norm_inf, solve_with_conductances, DenseMatrix, ElectricalSolution, RealVector,
    SolveOptions, WeightVector,
};
use crate::linf::MAX_LONG_STEP_EXPONENT;
use crate::params;
use crate::trace::{Decision, IterationRecord, IterationTrace, StepMode};

/// `1 + 1/((1+eps)^2 - 1)`.
pub fn default_conductance_budget(eps: f64) -> f64 {
    1.0 + 1.0 / ((1.0 + eps) * (1.0 + eps) - 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct L1Config {
    pub eps: f64,
    pub target: f64,
    pub step_mode: StepMode,
    /// `rho`; iterates with `||g||_inf <= rho / M` enter the average. Defaults to `m^(1/3)`.
    pub averaging_threshold: Option<f64>,
    /// The loop runs while `||c||_1 <= budget`. Defaults to [`default_conductance_budget`].
    pub budget: Option<f64>,
    pub max_iterations: Option<usize>,
    /// Initial conductances; rescaled to `||c||_1 = 1`.
    pub warm_start: Option<WeightVector>,
    pub solve: SolveOptions,
}

impl L1Config {
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
pub enum L1Outcome {
    /// `Ax = b` and `||x||_1 <= (1+eps) M`; `c_simplex` are the final
    /// conductances scaled to sum to one.
    Feasible {
        x: RealVector,
        l1_norm: f64,
        c_simplex: WeightVector,
    },
    /// `b^T phi / ||A^T phi||_inf = dual_value >= (1-eps) M`, so every
    /// feasible `x` has `||x||_1 >= dual_value`.
    Infeasible { phi: RealVector, dual_value: f64 },
}

impl L1Outcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, L1Outcome::Feasible { .. })
    }
}

/// Thresholded update factors: `1` where `|g_i| <= 1/((1-eps) M)`, else `g_i^2 M^2`.
pub fn l1_update_factors(g: &[f64], target: f64, eps: f64) -> Vec<f64> {
    let threshold = 1.0 / ((1.0 - eps) * target);
    let m2 = target * target;
    g.iter()
        .map(|&gi| {
            if gi.abs() <= threshold {
                1.0
            } else {
                gi * gi * m2
            }
        })
        .collect()
}

/// `x = diag(c) A^T (A diag(c) A^T)^+ b`.
///
/// Satisfies `Ax = b` and `||x||_1^2 <= ||c||_1 * b^T (A diag(c) A^T)^+ b`.
/// Invariant under positive rescaling of `c`.
pub fn extract_feasible(
    c: &WeightVector,
    a: &DenseMatrix,
    b: &[f64],
    opts: &SolveOptions,
) -> Result<RealVector> {
    check_len("b", b.len(), a.n_rows())?;
    check_len("weights", c.len(), a.n_cols())?;
    Ok(solve_with_conductances(a, b, &c.conductances_vec(), opts)?.flow)
}

/// `b^T phi / ||A^T phi||_inf`, with `0/0 = 0`.
pub fn l1_dual_ratio(a: &DenseMatrix, b: &[f64], phi: &[f64]) -> Result<f64> {
    check_len("b", b.len(), a.n_rows())?;
    check_len("phi", phi.len(), a.n_rows())?;
    let num = dot(b, phi);
    let den = norm_inf(&a.tr_mul_vec(phi));
    if den == 0.0 {
        if num == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::DegenerateCertificate(num));
    }
    Ok(num / den)
}

/// Checks `b^T phi / ||A^T phi||_inf >= (1-eps) M`, which by weak duality
/// certifies `min ||x||_1 >= (1-eps) M`.
pub fn verify_l1_dual(
    a: &DenseMatrix,
    b: &[f64],
    phi: &[f64],
    target: f64,
    eps: f64,
) -> Result<bool> {
    Ok(l1_dual_ratio(a, b, phi)? >= (1.0 - eps) * target)
}

fn finite_weights(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite() && *x > 0.0) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(
            "weights overflowed; the target is far above the optimum scale".into(),
        ))
    }
}

struct LongStep {
    weights: Vec<f64>,
    exponent: u32,
    guard_solves: usize,
    solution: Option<ElectricalSolution>,
}

/// Conductance version of the exponent-doubling step: guard is
/// `(1/E_new - 1/E_old) / ||c_new - c||_1 >= 1/M^2`.
fn long_step(
    a: &DenseMatrix,
    b: &[f64],
    c: &[f64],
    alpha: &[f64],
    target: f64,
    energy: f64,
    budget: f64,
    opts: &SolveOptions,
) -> LongStep {
    let inv_m2 = 1.0 / (target * target);
    let mut best = LongStep {
        weights: c.iter().zip(alpha).map(|(ci, ai)| ci * ai).collect(),
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
        let candidate: Vec<f64> = c.iter().zip(&factors).map(|(ci, fi)| ci * fi).collect();
        if candidate.iter().any(|v| !v.is_finite()) {
            break;
        }
        let Ok(sol) = solve_with_conductances(a, b, &candidate, opts) else {
            break;
        };
        best.guard_solves += 1;
        if !(sol.energy > 0.0) {
            break;
        }
        let added: f64 = candidate.iter().zip(c).map(|(n, o)| n - o).sum();
        if (1.0 / sol.energy - 1.0 / energy) / added >= inv_m2 {
            best.weights = candidate;
            best.exponent = k;
            best.solution = Some(sol);
        } else {
            break;
        }
    }
    best
}

/// Long-step conductance update for conductances `c` with potentials `phi`
/// (so `b^T phi` is the current energy). Returns `c * alpha^(2^k)` for the
/// largest `k <= 30` that keeps the inverse-energy ratio at least `1/M^2`.
pub fn l1_long_step_update(
    c: &WeightVector,
    phi: &[f64],
    target: f64,
    eps: f64,
    a: &DenseMatrix,
    b: &[f64],
    opts: &SolveOptions,
) -> Result<WeightVector> {
    check_len("phi", phi.len(), a.n_rows())?;
    check_len("weights", c.len(), a.n_cols())?;
    let energy = dot(b, phi);
    if !(energy > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "b^T phi must be positive, got {energy}"
        )));
    }
    let g: Vec<f64> = a.tr_mul_vec(phi).iter().map(|v| v / energy).collect();
    let alpha = l1_update_factors(&g, target, eps);
    if alpha.iter().all(|&v| v == 1.0) {
        return Ok(c.clone());
    }
    let cv = c.conductances_vec();
    let step = long_step(a, b, &cv, &alpha, target, energy, f64::INFINITY, opts);
    finite_weights(&step.weights)?;
    WeightVector::conductances(step.weights)
}

/// Runs the decision procedure for target `cfg.target` and accuracy `cfg.eps`.
pub fn l1_decide(a: &DenseMatrix, b: &[f64], cfg: &L1Config) -> Result<Decision<L1Outcome>> {
    cfg.validate()?;
    check_len("b", b.len(), a.n_rows())?;
    let n = a.n_rows();
    let m = a.n_cols();
    let eps = cfg.eps;
    let target = cfg.target;
    let rho = cfg
        .averaging_threshold
        .unwrap_or_else(|| params::default_averaging_threshold(m));
    let budget = cfg
        .budget
        .unwrap_or_else(|| default_conductance_budget(eps));
    let cap = cfg
        .max_iterations
        .unwrap_or_else(|| params::default_max_iterations(m, eps));
    let opts = &cfg.solve;
    let mut trace = IterationTrace::new(1.0 / (target * target));

    let mut c: Vec<f64> = match &cfg.warm_start {
        Some(w) => {
            check_len("warm start", w.len(), m)?;
            w.normalized().conductances_vec()
        }
        None => vec![1.0 / m as f64; m],
    };

    if b.iter().all(|&v| v == 0.0) {
        let final_weights = WeightVector::conductances(c)?;
        return Ok(Decision {
            outcome: L1Outcome::Feasible {
                x: vec![0.0; m],
                l1_norm: 0.0,
                c_simplex: final_weights.normalized(),
            },
            trace,
            final_weights,
        });
    }

    let threshold = 1.0 / ((1.0 - eps) * target);
    let mut grad_sum = vec![0.0; m];
    let mut phi_sum = vec![0.0; n];
    let mut averaged_count = 0usize;
    let mut cached: Option<ElectricalSolution> = None;
    let mut pending: Option<f64> = None;

    while norm1(&c) <= budget {
        if trace.records.len() >= cap {
            return Err(Error::IterationCapExceeded(cap));
        }
        let sol = match cached.take() {
            Some(s) => s,
            None => solve_with_conductances(a, b, &c, opts)?,
        };
        let energy = sol.energy;
        if !(energy > 0.0) {
            return Err(Error::InvariantViolation(format!(
                "b^T phi = {energy} for nonzero b in the span"
            )));
        }
        close_pending(&mut trace, &mut pending, energy);
        let g: Vec<f64> = a
            .tr_mul_vec(&sol.potentials)
            .iter()
            .map(|v| v / energy)
            .collect();
        let mut record = IterationRecord {
            weight_norm1: norm1(&c),
            energy,
            invariant_ratio: None,
            increased: 0,
            max_alpha: 1.0,
            averaged: false,
            step_exponent: 0,
            guard_solves: 0,
        };

        if norm_inf(&g) <= rho / target {
            record.averaged = true;
            averaged_count += 1;
            for (s, gi) in grad_sum.iter_mut().zip(&g) {
                *s += gi.abs();
            }
            for (s, p) in phi_sum.iter_mut().zip(&sol.potentials) {
                *s += p / energy;
            }
            if norm_inf(&grad_sum) / averaged_count as f64 <= threshold {
                let k = averaged_count as f64;
                let phi: Vec<f64> = phi_sum.iter().map(|s| s / k).collect();
                trace.records.push(record);
                return Ok(Decision {
                    outcome: L1Outcome::Infeasible {
                        dual_value: l1_dual_ratio(a, b, &phi)?,
                        phi,
                    },
                    trace,
                    final_weights: WeightVector::conductances(c)?,
                });
            }
        }

        let alpha = l1_update_factors(&g, target, eps);
        record.increased = alpha.iter().filter(|&&v| v > 1.0).count();
        record.max_alpha = alpha.iter().copied().fold(1.0, f64::max);
        if record.increased == 0 {
            trace.records.push(record);
            let phi = sol.potentials;
            return Ok(Decision {
                outcome: L1Outcome::Infeasible {
                    dual_value: l1_dual_ratio(a, b, &phi)?,
                    phi,
                },
                trace,
                final_weights: WeightVector::conductances(c)?,
            });
        }

        let next = match cfg.step_mode {
            StepMode::Short => c.iter().zip(&alpha).map(|(ci, ai)| ci * ai).collect(),
            StepMode::Long => {
                let step = long_step(a, b, &c, &alpha, target, energy, budget, opts);
                record.step_exponent = step.exponent;
                record.guard_solves = step.guard_solves;
                cached = step.solution;
                step.weights
            }
        };
        finite_weights(&next)?;
        pending = Some(next.iter().zip(&c).map(|(n, o)| n - o).sum());
        trace.records.push(record);
        c = next;
    }

    let sol = match cached.take() {
        Some(s) => s,
        None => solve_with_conductances(a, b, &c, opts)?,
    };
    close_pending(&mut trace, &mut pending, sol.energy);
    let final_weights = WeightVector::conductances(c)?;
    Ok(Decision {
        outcome: L1Outcome::Feasible {
            l1_norm: norm1(&sol.flow),
            x: sol.flow,
            c_simplex: final_weights.normalized(),
        },
        trace,
        final_weights,
    })
}

fn close_pending(trace: &mut IterationTrace, pending: &mut Option<f64>, energy: f64) {
    if let Some(added) = pending.take() {
        if let Some(last) = trace.records.last_mut() {
            last.invariant_ratio = Some((1.0 / energy - 1.0 / last.energy) / added);
        }
    }
}
