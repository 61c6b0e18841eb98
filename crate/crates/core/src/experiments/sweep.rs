use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::delay::lagged_rmse;
use super::noise::{bandlimited_noise, DEFAULT_CUTOFF};
use super::{mean_square, rmse};
use crate::basis::{basis_eval_all, BasisSpec};
use crate::error::{invalid, Error, Result};
use crate::hippo::{delay_readout, Method, StateSystem};
use crate::ssm::{discrete_kernel, discretize, final_state, DiscMethod, Signal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepTask {
    /// Reproduce the input from `lag` samples ago.
    Delay,
    /// Reconstruct the most recent `lag` samples from the state.
    Reconstruction,
}

impl fmt::Display for SweepTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepTask::Delay => "delay",
            SweepTask::Reconstruction => "reconstruction",
        })
    }
}

impl FromStr for SweepTask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "delay" => Ok(SweepTask::Delay),
            "reconstruction" | "reconstruct" => Ok(SweepTask::Reconstruction),
            other => Err(invalid(format!("unknown sweep task `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub dt: f64,
    pub metric: f64,
    pub chance: f64,
}

/// Log-uniform grid with both endpoints included.
pub fn log_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && max.is_finite()) {
        return Err(invalid(format!("need 0 < min <= max, got {min}, {max}")));
    }
    if count == 0 {
        return Err(invalid("grid needs at least one point"));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let ratio = max / min;
    let mut grid: Vec<f64> =
        (0..count).map(|i| min * ratio.powf(i as f64 / (count - 1) as f64)).collect();
    grid[count - 1] = max;
    Ok(grid)
}

/// Settings shared by every point of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub method: Method,
    pub state_size: usize,
    pub normalized: bool,
    pub task: SweepTask,
    /// Dependency length in samples.
    pub lag: usize,
    pub len: usize,
    pub seed: u64,
    pub cutoff: f64,
}

impl SweepSpec {
    pub fn new(method: Method, state_size: usize, task: SweepTask) -> Self {
        Self {
            method,
            state_size,
            normalized: false,
            task,
            lag: 1000,
            len: 4000,
            seed: 0,
            cutoff: DEFAULT_CUTOFF,
        }
    }
}

pub fn sweep_point(spec: &SweepSpec, dt: f64) -> Result<SweepRow> {
    if spec.lag == 0 || spec.lag >= spec.len {
        return Err(invalid(format!("lag {} must lie in 1..{}", spec.lag, spec.len)));
    }
    let sys = StateSystem::build(spec.method, spec.state_size, spec.normalized)?;
    let u = bandlimited_noise(spec.seed, spec.len, spec.cutoff)?;
    let (metric, chance) = match spec.task {
        SweepTask::Delay => {
            let disc = discretize(&delay_readout(sys)?, dt, DiscMethod::Bilinear)?;
            lagged_rmse(&discrete_kernel(&disc, spec.len)?, &u, spec.lag)?
        }
        SweepTask::Reconstruction => {
            let basis = BasisSpec::new(spec.method, spec.state_size, spec.normalized)?;
            let disc = discretize(&sys, dt, DiscMethod::Bilinear)?;
            let x = final_state(&disc, &Signal::new(u.clone(), dt)?, spec.len)?;
            let mut recon = Vec::with_capacity(spec.lag);
            for j in 0..spec.lag {
                let p = basis_eval_all(&basis, (j as f64 + 0.5) * dt)?;
                recon.push(p.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>());
            }
            let truth: Vec<f64> = u.iter().rev().take(spec.lag).copied().collect();
            (rmse(&recon, &truth), (mean_square(&recon) + mean_square(&truth)).sqrt())
        }
    };
    Ok(SweepRow { dt, metric, chance })
}

pub fn timescale_sweep(spec: &SweepSpec, dts: &[f64]) -> Result<Vec<SweepRow>> {
    if dts.is_empty() {
        return Err(invalid("sweep needs at least one step size"));
    }
    dts.iter().map(|&dt| sweep_point(spec, dt)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_and_spacing() {
        let g = log_grid(1e-4, 1e-1, 4).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[3], 1e-1);
        assert!((g[1] - 1e-3).abs() < 1e-15);
        assert_eq!(log_grid(0.5, 0.5, 1).unwrap(), vec![0.5]);
        assert!(log_grid(1.0, 0.5, 3).is_err());
        assert!(log_grid(0.0, 0.5, 3).is_err());
        assert!(log_grid(0.1, 0.5, 0).is_err());
    }

    #[test]
    fn task_names() {
        assert_eq!("delay".parse::<SweepTask>().unwrap(), SweepTask::Delay);
        assert_eq!("reconstruct".parse::<SweepTask>().unwrap(), SweepTask::Reconstruction);
        assert!("x".parse::<SweepTask>().is_err());
        assert!(timescale_sweep(&SweepSpec::new(Method::FouT, 8, SweepTask::Delay), &[]).is_err());
    }

    #[test]
    fn reconstruction_sweep_prefers_matching_window() {
        let spec = SweepSpec { lag: 100, len: 600, ..SweepSpec::new(Method::LegT, 32, SweepTask::Reconstruction) };
        let good = sweep_point(&spec, 0.01).unwrap();
        let short = sweep_point(&spec, 0.05).unwrap();
        assert!(good.metric < short.metric);
    }
}
