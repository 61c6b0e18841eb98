use std::path::Path;

use hippo_core::experiments::{
    delay_experiment_with, log_grid, normalization_experiment, reconstruct_history, sweep_point, white_noise,
    DelayConfig, SweepRow, SweepSpec,
};
use hippo_core::hippo::{delay_readout, Transform};
use hippo_core::numerics::fft_convolve;
use hippo_core::ssm::{discrete_kernel, discretize, sample_kernels};
use hippo_core::{Method, Signal, StateSystem};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Command, Format, KernelMode, RunConfig};
use crate::failure::Failure;
use crate::table::{read_signal, Table};
use crate::verify::{corrupt, run_suites};

/// What a command produced, before it is rendered to a file or stdout.
pub struct Outcome {
    pub payload: Value,
    pub table: Option<Table>,
    pub summary: String,
    pub passed: bool,
}

impl Outcome {
    fn new(payload: impl Serialize, table: Option<Table>, summary: String) -> Result<Self, Failure> {
        let payload = serde_json::to_value(payload).map_err(|e| Failure::io(e.to_string()))?;
        Ok(Self { payload, table, summary, passed: true })
    }
}

const THREADS_VAR: &str = "HIPPO_LAB_THREADS";

pub fn execute(cfg: &RunConfig) -> Result<Outcome, Failure> {
    if cfg.format == Format::Csv && matches!(cfg.command, Command::Gen | Command::Verify) {
        return Err(Failure::usage(format!("{} writes JSON only", cfg.command)));
    }
    if cfg.input.is_some() && !matches!(cfg.command, Command::Reconstruct | Command::Delay) {
        return Err(Failure::usage(format!("{} does not read an input signal", cfg.command)));
    }
    match cfg.command {
        Command::Gen => gen(cfg),
        Command::Kernel => kernel(cfg),
        Command::Verify => verify(cfg),
        Command::Reconstruct => reconstruct(cfg),
        Command::Delay => delay(cfg),
        Command::Normalize => normalize(cfg),
        Command::Sweep => sweep(cfg),
    }
}

fn system(cfg: &RunConfig) -> Result<StateSystem, Failure> {
    let sys = StateSystem::build(cfg.method, cfg.state_size, cfg.normalized)?;
    Ok(if cfg.delay_readout { delay_readout(sys)? } else { sys })
}

fn input_signal(cfg: &RunConfig) -> Result<Option<Vec<f64>>, Failure> {
    cfg.input.as_deref().map(|p| read_signal(Path::new(p))).transpose()
}

#[derive(Serialize)]
struct GenPayload<'a> {
    method: Method,
    normalized: bool,
    state_size: usize,
    a: Vec<Vec<f64>>,
    b: &'a [f64],
    c: Option<&'a [f64]>,
    d: f64,
    provenance: &'a [Transform],
}

fn gen(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let sys = system(cfg)?;
    let payload = GenPayload {
        method: sys.method(),
        normalized: sys.normalized(),
        state_size: sys.state_size(),
        a: sys.a().to_rows(),
        b: sys.b(),
        c: sys.c(),
        d: sys.d(),
        provenance: sys.provenance(),
    };
    let summary = format!("{} N={} normalized={}", sys.method(), sys.state_size(), sys.normalized());
    Outcome::new(payload, None, summary)
}

fn kernel(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let sys = system(cfg)?;
    let table = match cfg.mode {
        KernelMode::Continuous => {
            let k = sample_kernels(&sys, cfg.dt, cfg.len)?;
            (0..sys.state_size())
                .fold(Table::default().real("t", k.times().to_vec()), |t, n| t.real(format!("K_{n}"), k.kernel(n).to_vec()))
        }
        KernelMode::Discrete => {
            let k = discrete_kernel(&discretize(&sys, cfg.dt, cfg.disc)?, cfg.len)?;
            Table::default().index("k", (0..cfg.len as u64).collect()).real("K", k)
        }
    };
    let summary = format!("{} kernel, {} rows x {} columns", mode_name(cfg.mode), table.rows(), table.columns.len());
    Outcome::new(&table, Some(table.clone()), summary)
}

fn mode_name(mode: KernelMode) -> &'static str {
    match mode {
        KernelMode::Continuous => "continuous",
        KernelMode::Discrete => "discrete",
    }
}

fn verify(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let mut sys = StateSystem::build(cfg.method, cfg.state_size, cfg.normalized)?;
    if cfg.fuzz {
        sys = corrupt(sys, cfg.seed)?;
    }
    let report = run_suites(&sys, cfg.suite, cfg.dt, cfg.seed, cfg.fuzz)?;
    let failed: Vec<&str> =
        report.checks.iter().filter(|c| c.status == crate::verify::Status::Fail).map(|c| c.name.as_str()).collect();
    let summary = if failed.is_empty() {
        format!("all {} checks passed", report.checks.len())
    } else {
        format!("{} of {} checks failed: {}", failed.len(), report.checks.len(), failed.join("; "))
    };
    let passed = report.passed;
    let mut out = Outcome::new(&report, None, summary)?;
    out.passed = passed;
    Ok(out)
}

#[derive(Serialize)]
struct ReconstructPayload<'a> {
    overall_rmse: f64,
    newest_rmse: f64,
    oldest_rmse: f64,
    result: &'a hippo_core::experiments::ReconstructionResult,
}

fn reconstruct(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let sys = StateSystem::build(cfg.method, cfg.state_size, cfg.normalized)?;
    let samples = match input_signal(cfg)? {
        Some(s) => s,
        None => white_noise(cfg.seed, cfg.len)?,
    };
    let steps = cfg.len.min(samples.len());
    let u = Signal::new(samples, cfg.dt)?;
    let r = reconstruct_history(&sys, &u, cfg.dt, steps)?;
    let n = r.truth.len();
    let t0 = (steps - n) as f64 * cfg.dt;
    let table = Table::default()
        .real("t", (0..n).map(|i| t0 + i as f64 * cfg.dt).collect())
        .real("truth", r.truth.samples().to_vec())
        .real("reconstruction", r.reconstruction.samples().to_vec());
    let payload = ReconstructPayload {
        overall_rmse: r.overall_rmse(),
        newest_rmse: r.newest_rmse(),
        oldest_rmse: r.oldest_rmse(),
        result: &r,
    };
    let summary = format!(
        "reconstructed {n} samples: rmse {:.4e}, newest decile {:.4e}, oldest decile {:.4e}",
        payload.overall_rmse, payload.newest_rmse, payload.oldest_rmse
    );
    Outcome::new(&payload, Some(table), summary)
}

fn delay(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let dc = DelayConfig {
        disc: cfg.disc,
        normalized: cfg.normalized,
        seed: cfg.seed,
        cutoff: cfg.cutoff,
        ..DelayConfig::new(cfg.method, cfg.state_size, cfg.dt, cfg.len)
    };
    let mut r = delay_experiment_with(&dc)?;
    if let Some(u) = input_signal(cfg)? {
        let lag = r.lag_target;
        if u.len() <= lag {
            return Err(Failure::usage(format!("input has {} samples, the lag is {lag}", u.len())));
        }
        let y = fft_convolve(&r.kernel, &u)?;
        let (y, target) = (&y[lag..u.len()], &u[..u.len() - lag]);
        let ms = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64;
        let err: Vec<f64> = y.iter().zip(target).map(|(a, b)| a - b).collect();
        r.rmse_vs_lagged = ms(&err).sqrt();
        r.chance_rmse = (ms(y) + ms(target)).sqrt();
    }
    let table = Table::default().index("k", (0..r.kernel.len() as u64).collect()).real("K", r.kernel.clone());
    let summary = format!(
        "lag {} argmax {} mass {:.4} rmse {:.4e} chance {:.4e}",
        r.lag_target, r.argmax_index, r.mass_at_target, r.rmse_vs_lagged, r.chance_rmse
    );
    Outcome::new(&r, Some(table), summary)
}

fn normalize(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let sys = StateSystem::build(cfg.method, cfg.state_size, cfg.normalized)?;
    let r = normalization_experiment(&sys, cfg.level, cfg.dt, cfg.len)?;
    let table = Table::default().index("step", (1..=r.norms.len() as u64).collect()).real("norm_sq", r.norms.clone());
    let last = r.norms.last().copied().unwrap_or(0.0);
    let summary = format!("final |x|^2 {last:.6e}, limit {:.6e}", r.limit);
    Outcome::new(&r, Some(table), summary)
}

fn pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::usage(format!("{THREADS_VAR} must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Failure::io(e.to_string()))
}

fn sweep(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let (Some(lo), Some(hi)) = (cfg.dt_min, cfg.dt_max) else {
        return Err(Failure::usage("sweep needs --dt-min and --dt-max"));
    };
    let grid = log_grid(lo, hi, cfg.count)?;
    let spec = SweepSpec {
        normalized: cfg.normalized,
        lag: cfg.lag,
        len: cfg.len,
        seed: cfg.seed,
        cutoff: cfg.cutoff,
        ..SweepSpec::new(cfg.method, cfg.state_size, cfg.task)
    };
    let rows: Vec<SweepRow> =
        pool()?.install(|| grid.par_iter().map(|&dt| sweep_point(&spec, dt)).collect::<Result<_, _>>())?;
    let best = rows.iter().min_by(|a, b| a.metric.total_cmp(&b.metric)).expect("grid is non-empty");
    let summary = format!("{} points, best dt {:.4e} metric {:.4e} (chance {:.4e})", rows.len(), best.dt, best.metric, best.chance);
    let table = Table::default()
        .real("dt", rows.iter().map(|r| r.dt).collect())
        .real("metric", rows.iter().map(|r| r.metric).collect())
        .real("chance", rows.iter().map(|r| r.chance).collect());
    Outcome::new(&table, Some(table.clone()), summary)
}
