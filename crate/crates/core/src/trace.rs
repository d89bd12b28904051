//! Per-iteration diagnostics shared by both decision solvers.

use crate::linalg::WeightVector;

/// Short steps apply the thresholded factors once; long steps keep squaring
/// them while the energy-ratio invariant still holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepMode {
    #[default]
    Short,
    Long,
}

impl StepMode {
    pub fn as_str(self) -> &'static str {
        match self {
            StepMode::Short => "short",
            StepMode::Long => "long",
        }
    }
}

/// One iteration of a decision solver.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// `||w||_1` of the weights this iteration solved with.
    pub weight_norm1: f64,
    /// Electrical energy at those weights (`E_r` for l-infinity, `E_{1/c}` for l1).
    pub energy: f64,
    /// Ratio of potential increase to weight increase for the update taken
    /// this iteration: `dE / d||r||_1` (l-infinity) or `d(1/E) / d||c||_1` (l1).
    /// `None` if the iteration returned before updating.
    pub invariant_ratio: Option<f64>,
    /// Number of coordinates whose update factor exceeded one.
    pub increased: usize,
    pub max_alpha: f64,
    /// Whether this iterate entered the running average.
    pub averaged: bool,
    /// Exponent `k` of the applied factors `alpha^(2^k)`; always 0 for short steps.
    pub step_exponent: u32,
    /// Linear solves spent probing longer steps.
    pub guard_solves: usize,
}

/// Everything a run recorded, plus the invariant target its ratios are
/// measured against.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
    /// `M^2` for l-infinity runs, `1/M^2` for l1 runs.
    pub invariant_target: f64,
}

impl IterationTrace {
    pub fn new(invariant_target: f64) -> Self {
        Self {
            records: Vec::new(),
            invariant_target,
        }
    }

    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Smallest `ratio / target` over iterations that changed the weights.
    pub fn min_invariant_margin(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(|r| r.invariant_ratio)
            .map(|ratio| ratio / self.invariant_target)
            .min_by(f64::total_cmp)
    }

    pub fn total_solves(&self) -> usize {
        self.records.iter().map(|r| 1 + r.guard_solves).sum()
    }
}

/// Result of a decision solve.
#[derive(Debug, Clone)]
pub struct Decision<O> {
    pub outcome: O,
    pub trace: IterationTrace,
    /// Weights at the moment the solver returned (resistances for
    /// l-infinity, conductances for l1), unnormalized.
    pub final_weights: WeightVector,
}

impl<O> Decision<O> {
    pub fn iterations(&self) -> usize {
        self.trace.iterations()
    }
}
