//! Desk-scale studies built on the model and simulation layers.

mod delay;
mod fourier_bound;
mod noise;
mod normalization;
mod reconstruction;
mod sweep;

pub use delay::{delay_experiment, delay_experiment_with, DelayConfig, DelayResult};
pub use fourier_bound::{fourier_l2_error, fout_bound_check, fout_required_size, BoundCheck, TestKernel};
pub use noise::{bandlimited_noise, white_noise, DEFAULT_CUTOFF};
pub use normalization::{normalization_experiment, NormalizationResult};
pub use reconstruction::{reconstruct_history, ReconstructionResult, WindowRmse};
pub use sweep::{log_grid, sweep_point, timescale_sweep, SweepRow, SweepSpec, SweepTask};

pub(crate) fn rmse(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.is_empty() {
        return 0.0;
    }
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (s / a.len() as f64).sqrt()
}

pub(crate) fn mean_square(a: &[f64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.iter().map(|x| x * x).sum::<f64>() / a.len() as f64
}
