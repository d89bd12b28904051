//! Warm-started phase scheduling and the decision-to-optimization search.

use crate::electrical::electrical_energy;
use crate::error::{check_len, Error, Result};
use crate::l1::{l1_decide, L1Config, L1Outcome};
use crate::linalg::{
    norm1, norm2, norm_inf, weighted_least_squares, DenseMatrix, RealVector, SolveOptions,
    WeightRole, WeightVector,
};
use crate::linf::{linf_decide, LinfConfig, LinfOutcome};
use crate::trace::StepMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    Linf,
    L1,
}

impl Norm {
    pub fn as_str(self) -> &'static str {
        match self {
            Norm::Linf => "linf",
            Norm::L1 => "l1",
        }
    }

    pub fn eval(self, x: &[f64]) -> f64 {
        match self {
            Norm::Linf => norm_inf(x),
            Norm::L1 => norm1(x),
        }
    }
}

/// Norm-agnostic view of a decision result.
#[derive(Debug, Clone, PartialEq)]
pub enum DecisionOutcome {
    /// `Ax = b` with `||x|| = value <= (1+eps) M`.
    Feasible { x: RealVector, value: f64 },
    /// Every feasible `x` has `||x|| >= lower_bound >= (1-eps) M`.
    Infeasible {
        lower_bound: f64,
        certificate: Certificate,
    },
}

impl DecisionOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, DecisionOutcome::Feasible { .. })
    }

    pub fn tag(&self) -> &'static str {
        if self.is_feasible() {
            "feasible"
        } else {
            "infeasible"
        }
    }

    pub(crate) fn from_linf(o: LinfOutcome) -> Self {
        match o {
            LinfOutcome::Feasible { x, linf_norm } => DecisionOutcome::Feasible {
                x,
                value: linf_norm,
            },
            LinfOutcome::Infeasible {
                r_simplex,
                energy_lb,
            } => DecisionOutcome::Infeasible {
                lower_bound: energy_lb.sqrt(),
                certificate: Certificate::Resistances(r_simplex),
            },
        }
    }

    pub(crate) fn from_l1(o: L1Outcome) -> Self {
        match o {
            L1Outcome::Feasible { x, l1_norm, .. } => DecisionOutcome::Feasible { x, value: l1_norm },
            L1Outcome::Infeasible { phi, dual_value } => DecisionOutcome::Infeasible {
                lower_bound: dual_value,
                certificate: Certificate::Potentials(phi),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Resistances on the simplex with large electrical energy.
    Resistances(WeightVector),
    /// Potentials with large `b^T phi / ||A^T phi||_inf`.
    Potentials(RealVector),
}

/// A decision result together with its total cost.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionReport {
    pub outcome: DecisionOutcome,
    /// Solver iterations summed over all phases.
    pub iterations: usize,
    /// Number of nested decision calls (1 for a plain call).
    pub levels: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DecideOptions {
    pub step_mode: StepMode,
    pub solve: SolveOptions,
}

/// A single, non-phased decision call.
pub fn decide(
    a: &DenseMatrix,
    b: &[f64],
    eps: f64,
    target: f64,
    norm: Norm,
    opts: &DecideOptions,
) -> Result<DecisionReport> {
    Ok(plain(a, b, eps, target, norm, opts, None)?.0)
}

/// `(eps m)^(1/3)` clamped to `[1, m]`.
pub fn phased_averaging_threshold(eps: f64, m: usize) -> f64 {
    (eps * m as f64).cbrt().clamp(1.0, (m as f64).max(1.0))
}

/// Decision call warm-started from a coarser one.
///
/// Below accuracy 1/2 the problem is first solved at accuracy `2 eps` with a
/// slightly lower (l-infinity) or higher (l1) target, chosen so that an
/// inner certificate is already within `(1-2eps) M` of a certificate for the
/// outer problem. The outer call then starts from the inner call's final
/// weights with a budget of `max(3, needed)`, where `needed` is the smallest
/// budget for which the energy-ratio invariant still guarantees a valid
/// answer from that starting energy. An inner answer that already meets the
/// outer accuracy is returned directly.
pub fn phased_decide(
    a: &DenseMatrix,
    b: &[f64],
    eps: f64,
    target: f64,
    norm: Norm,
    opts: &DecideOptions,
) -> Result<DecisionReport> {
    crate::params::validate(eps, target, None, None)?;
    check_len("b", b.len(), a.n_rows())?;
    if eps >= 0.5 || b.iter().all(|&v| v == 0.0) {
        return decide(a, b, eps, target, norm, opts);
    }
    Ok(phase(a, b, eps, target, norm, opts)?.0)
}

/// One level of the recursion; also returns the final weights.
fn phase(
    a: &DenseMatrix,
    b: &[f64],
    eps: f64,
    target: f64,
    norm: Norm,
    opts: &DecideOptions,
) -> Result<(DecisionReport, WeightVector)> {
    if eps >= 0.5 {
        return plain(a, b, eps, target, norm, opts, None);
    }
    let eps_in = (2.0 * eps).min(0.5);
    let target_in = match norm {
        Norm::Linf => (1.0 - 2.0 * eps) * target / (1.0 - eps_in),
        Norm::L1 => (1.0 + 2.0 * eps) * target / (1.0 + eps_in),
    };
    let (inner, warm) = phase(a, b, eps_in, target_in, norm, opts)?;
    let done = match &inner.outcome {
        DecisionOutcome::Feasible { value, .. } => *value <= (1.0 + eps) * target,
        DecisionOutcome::Infeasible { lower_bound, .. } => *lower_bound >= (1.0 - eps) * target,
    };
    if done {
        return Ok((inner, warm));
    }

    let warm = warm.normalized();
    let e0 = electrical_energy(a, b, &warm, &opts.solve)?;
    let needed = match norm {
        Norm::Linf => (1.0 - e0 / (target * target)) / (1.0 - (1.0 - eps) * (1.0 - eps)),
        Norm::L1 => (1.0 - target * target / e0) / (1.0 - 1.0 / ((1.0 + eps) * (1.0 + eps))),
    };
    let top = Phase {
        warm,
        averaging_threshold: phased_averaging_threshold(eps, a.n_cols()),
        budget: needed.max(3.0),
    };
    let (mut rep, weights) = plain(a, b, eps, target, norm, opts, Some(top))?;
    rep.iterations += inner.iterations;
    rep.levels += inner.levels;
    Ok((rep, weights))
}

struct Phase {
    warm: WeightVector,
    averaging_threshold: f64,
    budget: f64,
}

fn plain(
    a: &DenseMatrix,
    b: &[f64],
    eps: f64,
    target: f64,
    norm: Norm,
    opts: &DecideOptions,
    phase: Option<Phase>,
) -> Result<(DecisionReport, WeightVector)> {
    let (outcome, iterations, weights) = match norm {
        Norm::Linf => {
            let mut cfg = LinfConfig::new(eps, target)?.with_step_mode(opts.step_mode);
            cfg.solve = opts.solve;
            if let Some(p) = phase {
                cfg.warm_start = Some(p.warm);
                cfg.averaging_threshold = Some(p.averaging_threshold);
                cfg.budget = Some(p.budget);
            }
            let d = linf_decide(a, b, &cfg)?;
            let it = d.trace.iterations();
            (DecisionOutcome::from_linf(d.outcome), it, d.final_weights)
        }
        Norm::L1 => {
            let mut cfg = L1Config::new(eps, target)?.with_step_mode(opts.step_mode);
            cfg.solve = opts.solve;
            if let Some(p) = phase {
                cfg.warm_start = Some(p.warm);
                cfg.averaging_threshold = Some(p.averaging_threshold);
                cfg.budget = Some(p.budget);
            }
            let d = l1_decide(a, b, &cfg)?;
            let it = d.trace.iterations();
            (DecisionOutcome::from_l1(d.outcome), it, d.final_weights)
        }
    };
    Ok((
        DecisionReport {
            outcome,
            iterations,
            levels: 1,
        },
        weights,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub step_mode: StepMode,
    /// Use [`phased_decide`] for every decision call.
    pub phases: bool,
    pub solve: SolveOptions,
    /// Cap on search steps before the final call.
    pub max_search_steps: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            step_mode: StepMode::Short,
            phases: false,
            solve: SolveOptions::default(),
            max_search_steps: 200,
        }
    }
}

/// One decision call made by the search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchStep {
    pub target: f64,
    pub eps: f64,
    pub feasible: bool,
    pub iterations: usize,
}

/// Certified bracket `lower <= OPT <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchState {
    pub lower: f64,
    pub upper: f64,
    pub history: Vec<SearchStep>,
}

impl SearchState {
    pub fn ratio(&self) -> f64 {
        self.upper / self.lower
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeResult {
    pub x: RealVector,
    /// `||x||` in the requested norm.
    pub value: f64,
    /// Certified lower bound on the optimum.
    pub lower_bound: f64,
    /// Initial bracket.
    pub initial: (f64, f64),
    pub search: SearchState,
    /// Decision-solver iterations over the whole search, final call included.
    pub iterations: usize,
}

/// Approximately minimizes `||x||` subject to `Ax = b`: returns `x` with
/// `||x|| <= (1+eps) OPT`.
pub fn optimize(
    a: &DenseMatrix,
    b: &[f64],
    eps: f64,
    norm: Norm,
    opts: &OptimizeOptions,
) -> Result<OptimizeResult> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "eps must lie in (0, 1/2], got {eps}"
        )));
    }
    check_len("b", b.len(), a.n_rows())?;
    let m = a.n_cols();
    if b.iter().all(|&v| v == 0.0) {
        return Ok(OptimizeResult {
            x: vec![0.0; m],
            value: 0.0,
            lower_bound: 0.0,
            initial: (0.0, 0.0),
            search: SearchState {
                lower: 0.0,
                upper: 0.0,
                history: Vec::new(),
            },
            iterations: 0,
        });
    }

    let uniform = WeightVector::uniform(m, WeightRole::Resistances)?;
    let x0 = weighted_least_squares(a, b, &uniform, &opts.solve)?.flow;
    let (lower, upper) = match norm {
        Norm::Linf => (norm2(&x0) / (m as f64).sqrt(), norm_inf(&x0)),
        Norm::L1 => (norm2(&x0), norm1(&x0)),
    };
    if !(lower > 0.0) {
        return Err(Error::InvariantViolation(format!(
            "initial lower bound {lower} is not positive"
        )));
    }
    let mut best = (upper, x0);
    let mut state = SearchState {
        lower,
        upper: upper.max(lower),
        history: Vec::new(),
    };
    let dopts = DecideOptions {
        step_mode: opts.step_mode,
        solve: opts.solve,
    };
    let call = |eps: f64, target: f64| {
        if opts.phases {
            phased_decide(a, b, eps, target, norm, &dopts)
        } else {
            decide(a, b, eps, target, norm, &dopts)
        }
    };

    let stop = 1.0 + eps / 4.0;
    let mut iterations = 0;
    while state.ratio() > stop {
        if state.history.len() >= opts.max_search_steps {
            return Err(Error::InvariantViolation(format!(
                "search did not converge in {} steps",
                opts.max_search_steps
            )));
        }
        let target = (state.lower * state.upper).sqrt();
        let step_eps = (state.ratio().powf(1.0 / 6.0) - 1.0).min(0.5);
        let rep = call(step_eps, target)?;
        iterations += rep.iterations;
        match &rep.outcome {
            DecisionOutcome::Feasible { value, x } => {
                state.upper = state.upper.min(*value);
                if *value < best.0 {
                    best = (*value, x.clone());
                }
            }
            DecisionOutcome::Infeasible { lower_bound, .. } => {
                state.lower = state.lower.max(*lower_bound);
            }
        }
        if state.lower > state.upper {
            // equal up to rounding when OPT sits exactly on a bracket end
            if state.lower > state.upper * (1.0 + 1e-9) {
                return Err(Error::InvariantViolation(format!(
                    "bracket inverted: [{}, {}]",
                    state.lower, state.upper
                )));
            }
            state.lower = state.upper;
        }
        state.history.push(SearchStep {
            target,
            eps: step_eps,
            feasible: rep.outcome.is_feasible(),
            iterations: rep.iterations,
        });
    }

    let final_eps = (eps / 4.0) / (1.0 + eps / 4.0);
    let final_target = state.upper * (1.0 + eps / 4.0);
    let rep = call(final_eps, final_target)?;
    iterations += rep.iterations;
    match rep.outcome {
        DecisionOutcome::Feasible { x, value } => Ok(OptimizeResult {
            x,
            value,
            lower_bound: state.lower,
            initial: (lower, upper),
            search: state,
            iterations,
        }),
        // A certificate here proves OPT >= U, so the point achieving U is optimal.
        DecisionOutcome::Infeasible { lower_bound, .. }
            if lower_bound <= best.0 * (1.0 + 1e-9) =>
        {
            Ok(OptimizeResult {
                x: best.1,
                value: best.0,
                lower_bound: state.lower.max(lower_bound),
                initial: (lower, upper),
                search: state,
                iterations,
            })
        }
        DecisionOutcome::Infeasible { lower_bound, .. } => Err(Error::InvariantViolation(format!(
            "final call certified a lower bound {lower_bound} above the achievable {}",
            best.0
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_var() -> DenseMatrix {
        DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn optimize_two_variable() {
        let r = optimize(&two_var(), &[1.0], 0.1, Norm::Linf, &OptimizeOptions::default()).unwrap();
        assert!(r.value >= 0.5 - 1e-12 && r.value <= 0.55);
        let r = optimize(&two_var(), &[1.0], 0.1, Norm::L1, &OptimizeOptions::default()).unwrap();
        assert!(r.value >= 1.0 - 1e-12 && r.value <= 1.1);
    }

    #[test]
    fn optimize_identity() {
        let r = optimize(
            &DenseMatrix::identity(2),
            &[3.0, 4.0],
            0.1,
            Norm::Linf,
            &OptimizeOptions::default(),
        )
        .unwrap();
        assert!((r.initial.0 - 5.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!((r.initial.1 - 4.0).abs() < 1e-12);
        assert!(r.value >= 4.0 - 1e-9 && r.value <= 4.4);
    }

    #[test]
    fn phased_matches_plain_on_easy_instance() {
        let o = DecideOptions::default();
        let p = phased_decide(&two_var(), &[1.0], 0.1, 0.6, Norm::Linf, &o).unwrap();
        assert!(p.outcome.is_feasible());
        let p = phased_decide(&two_var(), &[1.0], 0.1, 0.4, Norm::Linf, &o).unwrap();
        assert!(!p.outcome.is_feasible());
        let p = phased_decide(&two_var(), &[1.0], 0.1, 1.2, Norm::L1, &o).unwrap();
        assert!(p.outcome.is_feasible());
        let p = phased_decide(&two_var(), &[1.0], 0.1, 0.8, Norm::L1, &o).unwrap();
        assert!(!p.outcome.is_feasible());
    }

    #[test]
    fn half_accuracy_is_a_single_call() {
        let o = DecideOptions::default();
        let p = phased_decide(&two_var(), &[1.0], 0.5, 0.6, Norm::Linf, &o).unwrap();
        assert_eq!(p.levels, 1);
    }

    #[test]
    fn threshold_clamped() {
        assert_eq!(phased_averaging_threshold(0.01, 2), 1.0);
        assert!((phased_averaging_threshold(0.5, 2000) - 10.0).abs() < 1e-12);
    }
}
