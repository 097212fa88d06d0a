//! Truth-to-estimate matching and the squared-error score built on it.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Upper end of the angle range the non-coherent estimator reports.
pub const MAX_REPORTED_ANGLE_DEG: f64 = 90.0;

/// Injective map from `truth` to `estimates` minimizing the total squared
/// difference, found by exhaustive search. `result[i]` is the estimate index
/// paired with `truth[i]`. `None` when there are fewer estimates than truths.
///
/// Intended for the handful of targets in a scene; cost grows factorially.
pub fn optimal_assignment(truth: &[f64], estimates: &[f64]) -> Option<Vec<usize>> {
    if estimates.len() < truth.len() {
        return None;
    }
    let mut used = vec![false; estimates.len()];
    let mut current = Vec::with_capacity(truth.len());
    let mut best: Option<(f64, Vec<usize>)> = None;
    search(truth, estimates, &mut used, &mut current, 0.0, &mut best);
    best.map(|(_, assign)| assign)
}

fn search(
    truth: &[f64],
    estimates: &[f64],
    used: &mut [bool],
    current: &mut Vec<usize>,
    cost: f64,
    best: &mut Option<(f64, Vec<usize>)>,
) {
    if let Some((best_cost, _)) = best {
        if cost >= *best_cost {
            return;
        }
    }
    let depth = current.len();
    if depth == truth.len() {
        *best = Some((cost, current.clone()));
        return;
    }
    for j in 0..estimates.len() {
        if used[j] {
            continue;
        }
        let err = truth[depth] - estimates[j];
        used[j] = true;
        current.push(j);
        search(truth, estimates, used, current, cost + err * err, best);
        current.pop();
        used[j] = false;
    }
}

/// Sum of squared angle errors for one run under the optimal pairing.
pub fn run_squared_error(truth: &[f64], estimates: &[f64]) -> Result<f64> {
    if truth.len() != estimates.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            found: estimates.len(),
        });
    }
    let assign = optimal_assignment(truth, estimates).unwrap_or_default();
    Ok(truth
        .iter()
        .zip(assign)
        .map(|(t, j)| (t - estimates[j]) * (t - estimates[j]))
        .sum())
}

/// Squared error charged for a run that produced no estimates: each target
/// is scored as if it had been placed at the far end of the reported range.
pub fn failure_squared_error(truth: &[f64]) -> f64 {
    truth
        .iter()
        .map(|t| (MAX_REPORTED_ANGLE_DEG - t) * (MAX_REPORTED_ANGLE_DEG - t))
        .sum()
}

/// Running mean over Monte Carlo runs of the per-run summed squared error.
/// Errors are summed over targets, not averaged.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MseAccumulator {
    total: f64,
    runs: usize,
    failures: usize,
}

impl MseAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_run(&mut self, truth: &[f64], estimates: &[f64]) -> Result<f64> {
        let err = run_squared_error(truth, estimates)?;
        self.total += err;
        self.runs += 1;
        Ok(err)
    }

    pub fn add_failure(&mut self, truth: &[f64]) -> f64 {
        let err = failure_squared_error(truth);
        self.total += err;
        self.runs += 1;
        self.failures += 1;
        err
    }

    pub fn add_squared_error(&mut self, err: f64, failed: bool) {
        self.total += err;
        self.runs += 1;
        if failed {
            self.failures += 1;
        }
    }

    pub fn runs(&self) -> usize {
        self.runs
    }

    pub fn failures(&self) -> usize {
        self.failures
    }

    /// `0` before any run is added.
    pub fn mse(&self) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            self.total / self.runs as f64
        }
    }
}

/// MSE over a batch of runs given as `(truth, estimates)` pairs.
pub fn mse(runs: &[(Vec<f64>, Vec<f64>)]) -> Result<f64> {
    let mut acc = MseAccumulator::new();
    for (truth, est) in runs {
        acc.add_run(truth, est)?;
    }
    Ok(acc.mse())
}
