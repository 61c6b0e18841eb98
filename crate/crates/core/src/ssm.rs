//! Kernels, discretization and simulation of linear state space models.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hippo::StateSystem;
use crate::numerics::{complex_solve, mat_exp, solve_linear, ComplexMatrix, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscMethod {
    Bilinear,
    Zoh,
    Euler,
    BackwardEuler,
}

impl DiscMethod {
    pub const ALL: [DiscMethod; 4] =
        [DiscMethod::Bilinear, DiscMethod::Zoh, DiscMethod::Euler, DiscMethod::BackwardEuler];

    pub fn name(self) -> &'static str {
        match self {
            DiscMethod::Bilinear => "bilinear",
            DiscMethod::Zoh => "zoh",
            DiscMethod::Euler => "euler",
            DiscMethod::BackwardEuler => "backward-euler",
        }
    }
}

impl fmt::Display for DiscMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DiscMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bilinear" => Ok(DiscMethod::Bilinear),
            "zoh" => Ok(DiscMethod::Zoh),
            "euler" => Ok(DiscMethod::Euler),
            "backward-euler" | "backward_euler" => Ok(DiscMethod::BackwardEuler),
            other => Err(invalid(format!("unknown discretization `{other}`"))),
        }
    }
}

/// Discrete recurrence `x_k = Ā x_{k-1} + B̄ u_k`, `y_k = C x_k + D u_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteSystem {
    a_bar: Matrix,
    b_bar: Vec<f64>,
    c: Option<Vec<f64>>,
    d: f64,
    dt: f64,
    method: DiscMethod,
}

impl DiscreteSystem {
    pub fn a_bar(&self) -> &Matrix {
        &self.a_bar
    }

    pub fn b_bar(&self) -> &[f64] {
        &self.b_bar
    }

    pub fn c(&self) -> Option<&[f64]> {
        self.c.as_deref()
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn method(&self) -> DiscMethod {
        self.method
    }

    pub fn state_size(&self) -> usize {
        self.b_bar.len()
    }
}

/// Kernels `K_n(t_k)` sampled on a uniform grid starting at zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelTable {
    times: Vec<f64>,
    values: Matrix,
}

impl KernelTable {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `N × len` table, one row per basis index.
    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn kernel(&self, n: usize) -> &[f64] {
        self.values.row(n)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Uniformly sampled scalar signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    samples: Vec<f64>,
    dt: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        if samples.is_empty() {
            return Err(invalid("signal must have at least one sample"));
        }
        if !samples.iter().all(|x| x.is_finite()) {
            return Err(invalid("signal samples must be finite"));
        }
        Ok(Self { samples, dt })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// States and outputs of a simulation started from rest.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub states: Vec<Vec<f64>>,
    pub output: Signal,
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("step size must be positive and finite, got {dt}")))
    }
}

/// Samples `e^{tA}B` at `t = k·dt`, `k < len`, from one exponential.
pub fn sample_kernels(sys: &StateSystem, dt: f64, len: usize) -> Result<KernelTable> {
    check_dt(dt)?;
    if len == 0 {
        return Err(invalid("kernel length must be at least 1"));
    }
    let n = sys.state_size();
    let step = mat_exp(&sys.a().scaled(dt))?;
    let mut values = Matrix::zeros(n, len);
    let mut x = sys.b().to_vec();
    let mut next = vec![0.0; n];
    for k in 0..len {
        for (i, &v) in x.iter().enumerate() {
            values[(i, k)] = v;
        }
        if k + 1 < len {
            step.matvec_into(&x, &mut next);
            std::mem::swap(&mut x, &mut next);
        }
    }
    let times = (0..len).map(|k| k as f64 * dt).collect();
    Ok(KernelTable { times, values })
}

/// Solves `m · [Ā | B̄] = [p | q]` in one factorization.
fn resolvent_pair(m: &Matrix, p: &Matrix, q: &[f64]) -> Result<(Matrix, Vec<f64>)> {
    let n = m.rows();
    let rhs = Matrix::from_fn(n, n + 1, |i, j| if j < n { p[(i, j)] } else { q[i] });
    let sol = solve_linear(m, &rhs)?;
    let a_bar = Matrix::from_fn(n, n, |i, j| sol[(i, j)]);
    let b_bar = sol.col_vec(n);
    Ok((a_bar, b_bar))
}

pub fn discretize(sys: &StateSystem, dt: f64, method: DiscMethod) -> Result<DiscreteSystem> {
    check_dt(dt)?;
    let n = sys.state_size();
    let a = sys.a();
    let db: Vec<f64> = sys.b().iter().map(|x| dt * x).collect();
    let (a_bar, b_bar) = match method {
        DiscMethod::Euler => (a.scaled(dt).add_identity(1.0)?, db),
        DiscMethod::BackwardEuler => {
            let m = a.scaled(-dt).add_identity(1.0)?;
            resolvent_pair(&m, &Matrix::identity(n), &db)?
        }
        DiscMethod::Bilinear => {
            let half = a.scaled(0.5 * dt);
            let m = half.scaled(-1.0).add_identity(1.0)?;
            let p = half.add_identity(1.0)?;
            resolvent_pair(&m, &p, &db)?
        }
        DiscMethod::Zoh => {
            // exp([[ΔA, ΔB], [0, 0]]) = [[Ā, B̄], [0, 1]]
            let da = a.scaled(dt);
            let aug = Matrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
                (true, true) => da[(i, j)],
                (true, false) => db[i],
                _ => 0.0,
            });
            let e = mat_exp(&aug)?;
            (Matrix::from_fn(n, n, |i, j| e[(i, j)]), (0..n).map(|i| e[(i, n)]).collect())
        }
    };
    Ok(DiscreteSystem {
        a_bar,
        b_bar,
        c: sys.c().map(<[f64]>::to_vec),
        d: sys.d(),
        dt,
        method,
    })
}

/// One recurrence step; the output reads the updated state.
pub fn step(sys: &DiscreteSystem, x: &[f64], u: f64) -> Result<(Vec<f64>, f64)> {
    let n = sys.state_size();
    if x.len() != n {
        return Err(Error::Dimension(format!("state has length {}, system has {n}", x.len())));
    }
    let mut next = vec![0.0; n];
    advance(sys, x, u, &mut next);
    let y = readout(sys, &next, u);
    Ok((next, y))
}

#[inline]
fn advance(sys: &DiscreteSystem, x: &[f64], u: f64, out: &mut [f64]) {
    sys.a_bar.matvec_into(x, out);
    for (o, &b) in out.iter_mut().zip(&sys.b_bar) {
        *o += b * u;
    }
}

#[inline]
fn readout(sys: &DiscreteSystem, x: &[f64], u: f64) -> f64 {
    match &sys.c {
        Some(c) => c.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + sys.d * u,
        None => 0.0,
    }
}

fn check_signal_dt(sys: &DiscreteSystem, input: &Signal) -> Result<()> {
    if (input.dt - sys.dt).abs() > 1e-12 {
        return Err(invalid(format!("signal step {} does not match system step {}", input.dt, sys.dt)));
    }
    Ok(())
}

/// Runs the recurrence from rest over the whole input.
pub fn run(sys: &DiscreteSystem, input: &Signal) -> Result<Trajectory> {
    check_signal_dt(sys, input)?;
    let n = sys.state_size();
    let mut states = Vec::with_capacity(input.len());
    let mut outputs = Vec::with_capacity(input.len());
    let mut x = vec![0.0; n];
    let mut next = vec![0.0; n];
    for &u in input.samples() {
        advance(sys, &x, u, &mut next);
        std::mem::swap(&mut x, &mut next);
        outputs.push(readout(sys, &x, u));
        states.push(x.clone());
    }
    Ok(Trajectory { states, output: Signal::new(outputs, input.dt)? })
}

/// State after consuming the first `steps` samples, without storing the path.
pub fn final_state(sys: &DiscreteSystem, input: &Signal, steps: usize) -> Result<Vec<f64>> {
    check_signal_dt(sys, input)?;
    if steps > input.len() {
        return Err(invalid(format!("{steps} steps requested from a signal of {}", input.len())));
    }
    let n = sys.state_size();
    let mut x = vec![0.0; n];
    let mut next = vec![0.0; n];
    for &u in &input.samples()[..steps] {
        advance(sys, &x, u, &mut next);
        std::mem::swap(&mut x, &mut next);
    }
    Ok(x)
}

/// `K̄_k = C Ā^k B̄`, plus `D` at `k = 0`.
pub fn discrete_kernel(sys: &DiscreteSystem, len: usize) -> Result<Vec<f64>> {
    let c = sys.c.as_ref().ok_or(Error::MissingReadout)?;
    if len == 0 {
        return Err(invalid("kernel length must be at least 1"));
    }
    let n = sys.state_size();
    let mut v = sys.b_bar.clone();
    let mut next = vec![0.0; n];
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        out.push(c.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>());
        if k + 1 < len {
            sys.a_bar.matvec_into(&v, &mut next);
            std::mem::swap(&mut v, &mut next);
        }
    }
    out[0] += sys.d;
    Ok(out)
}

/// `C(sI − A)^{-1}B + D`.
pub fn transfer_function(sys: &StateSystem, s: Complex64) -> Result<Complex64> {
    let c = sys.c().ok_or(Error::MissingReadout)?;
    let n = sys.state_size();
    let a = sys.a();
    let m = ComplexMatrix::from_fn(n, n, |i, j| if i == j { s - a[(i, j)] } else { Complex64::new(-a[(i, j)], 0.0) });
    let rhs: Vec<Complex64> = sys.b().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let x = complex_solve(&m, &rhs)?;
    Ok(c.iter().zip(&x).map(|(&ci, &xi)| xi * ci).sum::<Complex64>() + sys.d())
}
