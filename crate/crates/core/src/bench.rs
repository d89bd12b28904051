//! Run records, CSV output and the benchmark grids.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instances::{random_orthogonal_instance, RegressionInstance};
use crate::l1::{l1_decide, L1Config};
use crate::linf::{linf_decide, LinfConfig};
use crate::meta::{
    optimize, phased_decide, DecideOptions, DecisionOutcome, Norm, OptimizeOptions,
};
use crate::trace::{IterationTrace, StepMode};

pub const CSV_HEADER: [&str; 13] = [
    "solver",
    "mode",
    "step",
    "n",
    "m",
    "eps",
    "target",
    "iterations",
    "wall_ms",
    "outcome",
    "objective",
    "certificate",
    "seed",
];

pub const TRACE_HEADER: [&str; 9] = [
    "iteration",
    "weight_norm1",
    "energy",
    "invariant_ratio",
    "increased",
    "max_alpha",
    "averaged",
    "step_exponent",
    "guard_solves",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Decide,
    Optimize,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Decide => "decide",
            Mode::Optimize => "optimize",
        }
    }
}

/// One solver run, as written to the results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub solver: Norm,
    pub mode: Mode,
    pub step: StepMode,
    pub n: usize,
    pub m: usize,
    pub eps: f64,
    /// Decision target; absent in optimize mode.
    pub target: Option<f64>,
    pub iterations: usize,
    pub wall_ms: f64,
    /// `feasible` or `infeasible`.
    pub outcome: &'static str,
    /// Norm of the returned point, if any.
    pub objective: Option<f64>,
    /// Certified lower bound on the optimum, if any.
    pub certificate: Option<f64>,
    pub seed: Option<u64>,
}

fn opt_field<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl RunRecord {
    pub fn csv_fields(&self) -> [String; 13] {
        [
            self.solver.as_str().to_string(),
            self.mode.as_str().to_string(),
            self.step.as_str().to_string(),
            self.n.to_string(),
            self.m.to_string(),
            self.eps.to_string(),
            opt_field(self.target),
            self.iterations.to_string(),
            format!("{:.3}", self.wall_ms),
            self.outcome.to_string(),
            opt_field(self.objective),
            opt_field(self.certificate),
            opt_field(self.seed),
        ]
    }
}

pub fn write_records<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record(r.csv_fields()).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace<W: Write>(out: W, trace: &IterationTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER).map_err(csv_err)?;
    for (i, r) in trace.records.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            r.weight_norm1.to_string(),
            r.energy.to_string(),
            opt_field(r.invariant_ratio),
            r.increased.to_string(),
            r.max_alpha.to_string(),
            r.averaged.to_string(),
            r.step_exponent.to_string(),
            r.guard_solves.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::InvalidArgument(format!("csv: {other:?}")),
    }
}

/// What to run on a single instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    pub norm: Norm,
    pub mode: Mode,
    pub step: StepMode,
    pub eps: f64,
    /// Required in decide mode.
    pub target: Option<f64>,
    pub phases: bool,
}

/// Result of [`run_instance`]: the record, the point found (if any) and
/// the per-iteration trace when the run was a single plain decision call.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: RunRecord,
    pub x: Option<Vec<f64>>,
    pub trace: Option<IterationTrace>,
}

pub fn run_instance(inst: &RegressionInstance, spec: &RunSpec) -> Result<RunOutput> {
    let (a, b) = (&inst.a, &inst.b);
    let start = Instant::now();
    let mut record = RunRecord {
        solver: spec.norm,
        mode: spec.mode,
        step: spec.step,
        n: a.n_rows(),
        m: a.n_cols(),
        eps: spec.eps,
        target: spec.target,
        iterations: 0,
        wall_ms: 0.0,
        outcome: "feasible",
        objective: None,
        certificate: None,
        seed: inst.seed,
    };
    let mut x = None;
    let mut trace = None;
    match spec.mode {
        Mode::Optimize => {
            let opts = OptimizeOptions {
                step_mode: spec.step,
                phases: spec.phases,
                ..OptimizeOptions::default()
            };
            let r = optimize(a, b, spec.eps, spec.norm, &opts)?;
            record.iterations = r.iterations;
            record.objective = Some(r.value);
            record.certificate = Some(r.lower_bound);
            x = Some(r.x);
        }
        Mode::Decide => {
            let target = spec.target.ok_or_else(|| {
                Error::InvalidArgument("decide mode needs a target".into())
            })?;
            let outcome = if spec.phases {
                let opts = DecideOptions {
                    step_mode: spec.step,
                    ..DecideOptions::default()
                };
                let rep = phased_decide(a, b, spec.eps, target, spec.norm, &opts)?;
                record.iterations = rep.iterations;
                rep.outcome
            } else {
                let (outcome, t) = plain_decide(inst, spec.norm, spec.eps, target, spec.step)?;
                record.iterations = t.iterations();
                trace = Some(t);
                outcome
            };
            record.outcome = outcome.tag();
            match outcome {
                DecisionOutcome::Feasible { x: xf, value } => {
                    record.objective = Some(value);
                    x = Some(xf);
                }
                DecisionOutcome::Infeasible { lower_bound, .. } => {
                    record.certificate = Some(lower_bound);
                }
            }
        }
    }
    record.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(RunOutput { record, x, trace })
}

fn plain_decide(
    inst: &RegressionInstance,
    norm: Norm,
    eps: f64,
    target: f64,
    step: StepMode,
) -> Result<(DecisionOutcome, IterationTrace)> {
    Ok(match norm {
        Norm::Linf => {
            let cfg = LinfConfig::new(eps, target)?.with_step_mode(step);
            let d = linf_decide(&inst.a, &inst.b, &cfg)?;
            (DecisionOutcome::from_linf(d.outcome), d.trace)
        }
        Norm::L1 => {
            let cfg = L1Config::new(eps, target)?.with_step_mode(step);
            let d = l1_decide(&inst.a, &inst.b, &cfg)?;
            (DecisionOutcome::from_l1(d.outcome), d.trace)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// `eps = 2^-k`, `k = 1..=12`, on one `n x m` instance.
    Eps,
    /// `m_k = k m`, `k = 1..=30`, at `eps = 0.01`.
    Columns,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub suite: Suite,
    pub norm: Norm,
    pub steps: Vec<StepMode>,
    pub n: usize,
    pub m: usize,
    pub sparsity: usize,
    pub seed: u64,
    pub max_k: Option<usize>,
    pub phases: bool,
    /// Worker threads; `None` uses the global default.
    pub threads: Option<usize>,
}

pub const EPS_SUITE_MAX_K: usize = 12;
pub const COLUMN_SUITE_MAX_K: usize = 30;
pub const COLUMN_SUITE_EPS: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
struct GridPoint {
    k: usize,
    eps: f64,
    m: usize,
    step: StepMode,
}

fn grid(cfg: &BenchConfig) -> Vec<GridPoint> {
    let full = match cfg.suite {
        Suite::Eps => EPS_SUITE_MAX_K,
        Suite::Columns => COLUMN_SUITE_MAX_K,
    };
    let last = cfg.max_k.map_or(full, |k| k.min(full));
    let mut points = Vec::new();
    for k in 1..=last {
        for &step in &cfg.steps {
            points.push(match cfg.suite {
                Suite::Eps => GridPoint {
                    k,
                    eps: 0.5f64.powi(k as i32),
                    m: cfg.m,
                    step,
                },
                Suite::Columns => GridPoint {
                    k,
                    eps: COLUMN_SUITE_EPS,
                    m: cfg.m * k,
                    step,
                },
            });
        }
    }
    points
}

/// Runs every grid point in optimize mode; records come back in grid order.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<RunRecord>> {
    if cfg.steps.is_empty() {
        return Err(Error::InvalidArgument("no step mode selected".into()));
    }
    let points = grid(cfg);
    let eps_instance = match cfg.suite {
        Suite::Eps => Some(random_orthogonal_instance(cfg.n, cfg.m, cfg.sparsity, cfg.seed)?),
        Suite::Columns => None,
    };
    let run = |p: &GridPoint| -> Result<RunRecord> {
        let owned;
        let inst = match &eps_instance {
            Some(i) => i,
            None => {
                owned = random_orthogonal_instance(cfg.n, p.m, cfg.sparsity, cfg.seed)?;
                &owned
            }
        };
        let spec = RunSpec {
            norm: cfg.norm,
            mode: Mode::Optimize,
            step: p.step,
            eps: p.eps,
            target: None,
            phases: cfg.phases,
        };
        Ok(run_instance(inst, &spec)?.record)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| points.par_iter().map(run).collect())
}

/// Worker cap from `IRLS_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("IRLS_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(suite: Suite) -> BenchConfig {
        BenchConfig {
            suite,
            norm: Norm::Linf,
            steps: vec![StepMode::Short, StepMode::Long],
            n: 3,
            m: 6,
            sparsity: 2,
            seed: 3,
            max_k: Some(3),
            phases: false,
            threads: Some(2),
        }
    }

    #[test]
    fn grid_shapes() {
        let g = grid(&cfg(Suite::Eps));
        assert_eq!(g.len(), 6);
        assert_eq!(g[2].eps, 0.25);
        assert_eq!(g[3].step, StepMode::Long);
        let mut c = cfg(Suite::Columns);
        c.max_k = None;
        let g = grid(&c);
        assert_eq!(g.len(), 60);
        assert_eq!(g[59].m, 180);
        assert!(g.iter().all(|p| p.eps == 0.01));
    }

    #[test]
    fn records_in_grid_order_and_reproducible() {
        let a = run_bench(&cfg(Suite::Eps)).unwrap();
        let b = run_bench(&cfg(Suite::Eps)).unwrap();
        assert_eq!(a.len(), 6);
        for (x, y) in a.iter().zip(&b) {
            let mut y = y.clone();
            y.wall_ms = x.wall_ms;
            assert_eq!(x, &y);
        }
        assert_eq!(a[0].eps, 0.5);
        assert_eq!(a[5].eps, 0.125);
    }

    #[test]
    fn csv_layout() {
        let rec = RunRecord {
            solver: Norm::L1,
            mode: Mode::Decide,
            step: StepMode::Short,
            n: 1,
            m: 2,
            eps: 0.1,
            target: Some(0.8),
            iterations: 1,
            wall_ms: 0.5,
            outcome: "infeasible",
            objective: None,
            certificate: Some(1.0),
            seed: None,
        };
        let mut buf = Vec::new();
        write_records(&mut buf, &[rec]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "solver,mode,step,n,m,eps,target,iterations,wall_ms,outcome,objective,certificate,seed"
        );
        assert_eq!(lines.next().unwrap(), "l1,decide,short,1,2,0.1,0.8,1,0.500,infeasible,,1,");
    }
}
