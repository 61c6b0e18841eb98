use serde::Serialize;

use super::rmse;
use crate::basis::{basis_eval_all, BasisSpec};
use crate::error::{invalid, Result};
use crate::hippo::{Method, StateSystem};
use crate::ssm::{discretize, final_state, DiscMethod, Signal};

/// RMSE over the absolute time range `[start, end)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowRmse {
    pub start: f64,
    pub end: f64,
    pub rmse: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructionResult {
    /// Input samples covered by the reconstruction, oldest first.
    pub truth: Signal,
    pub reconstruction: Signal,
    /// Ten equal windows, oldest first.
    pub per_window_rmse: Vec<WindowRmse>,
    pub state_size: usize,
    pub method: Method,
}

impl ReconstructionResult {
    pub fn overall_rmse(&self) -> f64 {
        rmse(self.truth.samples(), self.reconstruction.samples())
    }

    pub fn newest_rmse(&self) -> f64 {
        self.per_window_rmse.last().map_or(0.0, |w| w.rmse)
    }

    pub fn oldest_rmse(&self) -> f64 {
        self.per_window_rmse.first().map_or(0.0, |w| w.rmse)
    }
}

const WINDOWS: usize = 10;

/// Runs the bilinear recurrence over the first `at_step` samples and expands
/// the final state back into the input history it summarizes.
pub fn reconstruct_history(
    sys: &StateSystem,
    input: &Signal,
    dt: f64,
    at_step: usize,
) -> Result<ReconstructionResult> {
    if at_step == 0 || at_step > input.len() {
        return Err(invalid(format!("at_step {at_step} outside 1..={}", input.len())));
    }
    if (input.dt() - dt).abs() > 1e-12 {
        return Err(invalid(format!("signal step {} does not match dt {dt}", input.dt())));
    }
    if !sys.is_pristine() {
        return Err(invalid("reconstruction needs an untransformed HiPPO system"));
    }
    let spec = BasisSpec::new(sys.method(), sys.state_size(), sys.normalized())?;
    let disc = discretize(sys, dt, DiscMethod::Bilinear)?;
    let x = final_state(&disc, input, at_step)?;

    let count = match spec.window() {
        None => at_step,
        Some(w) => at_step.min((w / dt).round() as usize).max(1),
    };
    let first = at_step - count;
    let mut recon = Vec::with_capacity(count);
    for i in first..at_step {
        // bilinear weights sample i at the midpoint of its step
        let age = ((at_step - 1 - i) as f64 + 0.5) * dt;
        let p = basis_eval_all(&spec, age)?;
        recon.push(p.iter().zip(&x).map(|(a, b)| a * b).sum());
    }
    let truth: Vec<f64> = input.samples()[first..at_step].to_vec();

    let windows = WINDOWS.min(count);
    let per_window_rmse = (0..windows)
        .map(|w| {
            let lo = w * count / windows;
            let hi = (w + 1) * count / windows;
            WindowRmse {
                start: (first + lo) as f64 * dt,
                end: (first + hi) as f64 * dt,
                rmse: rmse(&truth[lo..hi], &recon[lo..hi]),
            }
        })
        .collect();

    Ok(ReconstructionResult {
        truth: Signal::new(truth, dt)?,
        reconstruction: Signal::new(recon, dt)?,
        per_window_rmse,
        state_size: sys.state_size(),
        method: sys.method(),
    })
}
