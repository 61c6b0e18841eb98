use serde::Serialize;

use super::noise::{bandlimited_noise, DEFAULT_CUTOFF};
use super::{mean_square, rmse};
use crate::error::{invalid, Result};
use crate::hippo::{delay_readout, Method, StateSystem};
use crate::numerics::fft_convolve;
use crate::ssm::{discrete_kernel, discretize, DiscMethod};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DelayConfig {
    pub method: Method,
    pub state_size: usize,
    pub dt: f64,
    pub len: usize,
    pub disc: DiscMethod,
    pub normalized: bool,
    pub seed: u64,
    /// Band edge of the test noise as a fraction of Nyquist.
    pub cutoff: f64,
}

impl DelayConfig {
    pub fn new(method: Method, state_size: usize, dt: f64, len: usize) -> Self {
        Self {
            method,
            state_size,
            dt,
            len,
            disc: DiscMethod::Bilinear,
            normalized: false,
            seed: 0,
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DelayResult {
    pub kernel: Vec<f64>,
    pub lag_target: usize,
    pub argmax_index: usize,
    /// Share of `Σ|K̄|` within two samples of the target lag.
    pub mass_at_target: f64,
    pub rmse_vs_lagged: f64,
    /// RMSE an output uncorrelated with the lagged input would score.
    pub chance_rmse: f64,
}

/// Lag in samples of a delay readout on a window of length `window`.
pub(crate) fn lag_samples(window: f64, dt: f64) -> usize {
    (window / dt - 1e-9).ceil() as usize
}

pub(crate) fn window_length(normalized: bool) -> f64 {
    if normalized { 2.0 } else { 1.0 }
}

/// `(rmse, chance)` of `kernel ∗ u` against `u` delayed by `lag` samples.
pub(crate) fn lagged_rmse(kernel: &[f64], u: &[f64], lag: usize) -> Result<(f64, f64)> {
    if lag >= u.len() {
        return Err(invalid(format!("lag {lag} leaves no samples in a signal of {}", u.len())));
    }
    let y = fft_convolve(kernel, u)?;
    let y = &y[lag..u.len()];
    let target = &u[..u.len() - lag];
    Ok((rmse(y, target), (mean_square(y) + mean_square(target)).sqrt()))
}

pub fn delay_experiment(method: Method, n: usize, dt: f64, len: usize) -> Result<DelayResult> {
    delay_experiment_with(&DelayConfig::new(method, n, dt, len))
}

pub fn delay_experiment_with(cfg: &DelayConfig) -> Result<DelayResult> {
    let sys = delay_readout(StateSystem::build(cfg.method, cfg.state_size, cfg.normalized)?)?;
    if !(cfg.dt > 0.0) {
        return Err(invalid("dt must be positive"));
    }
    let lag = lag_samples(window_length(cfg.normalized), cfg.dt);
    if cfg.len <= lag {
        return Err(invalid(format!("length {} cannot contain the lag of {lag} samples", cfg.len)));
    }
    let disc = discretize(&sys, cfg.dt, cfg.disc)?;
    let kernel = discrete_kernel(&disc, cfg.len)?;

    let argmax_index = kernel
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
        .0;
    let total: f64 = kernel.iter().map(|v| v.abs()).sum();
    let lo = lag.saturating_sub(2);
    let hi = (lag + 2).min(kernel.len() - 1);
    let near: f64 = kernel[lo..=hi].iter().map(|v| v.abs()).sum();
    let mass_at_target = if total > 0.0 { near / total } else { 0.0 };

    let u = bandlimited_noise(cfg.seed, cfg.len, cfg.cutoff)?;
    let (rmse_vs_lagged, chance_rmse) = lagged_rmse(&kernel, &u, lag)?;

    Ok(DelayResult { kernel, lag_target: lag, argmax_index, mass_at_target, rmse_vs_lagged, chance_rmse })
}
