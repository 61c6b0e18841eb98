use std::f64::consts::{PI, SQRT_2};

use hippo_core::basis::{basis_eval, gram_matrix, measure_eval};
use hippo_core::hippo::{delay_readout, scale, shift, unitary_conjugate};
use hippo_core::numerics::{mat_exp, pade_exp_continuants};
use hippo_core::ssm::{discretize, sample_kernels, transfer_function};
use hippo_core::{BasisSpec, ComplexValue, DiscMethod, Matrix, Method, Rng, StateSystem};
use serde::Serialize;

use crate::config::Suite;
use crate::failure::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub measured: Option<f64>,
    pub threshold: Option<f64>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn measure(suite: Suite, name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        let status = if measured <= threshold { Status::Pass } else { Status::Fail };
        Self { suite, name: name.into(), measured: Some(measured), threshold: Some(threshold), status, note: None }
    }

    fn skip(suite: Suite, name: impl Into<String>, note: impl Into<String>) -> Self {
        Self { suite, name: name.into(), measured: None, threshold: None, status: Status::Skip, note: Some(note.into()) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub method: Method,
    pub state_size: usize,
    pub fuzzed: bool,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Perturbs one seeded entry of `A` by a relative amount large enough to
/// break every identity that depends on it.
pub fn corrupt(sys: StateSystem, seed: u64) -> Result<StateSystem, Failure> {
    let n = sys.state_size();
    let mut rng = Rng::new(seed);
    let idx = (rng.next_u64() % (n * n) as u64) as usize;
    let mut a = sys.a().clone();
    let v = &mut a.as_mut_slice()[idx];
    *v += 0.25 * (1.0 + v.abs());
    Ok(sys.with_a(a)?)
}

pub fn run_suites(sys: &StateSystem, suite: Suite, dt: f64, seed: u64, fuzzed: bool) -> Result<Report, Failure> {
    let mut checks = Vec::new();
    let wants = |s: Suite| suite == Suite::All || suite == s;
    if wants(Suite::Matrix) {
        checks.push(matrix_check(sys));
    }
    if wants(Suite::Gram) {
        checks.push(gram_check(sys)?);
    }
    if wants(Suite::Closure) {
        checks.extend(closure_checks(sys, seed)?);
    }
    if wants(Suite::Dt) {
        checks.push(dt_check(sys, dt)?);
    }
    if wants(Suite::Pade) {
        checks.push(pade_check(sys, seed)?);
    }
    if wants(Suite::Kernel) {
        checks.push(kernel_check(sys)?);
    }
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    Ok(Report { method: sys.method(), state_size: sys.state_size(), fuzzed, checks, passed })
}

fn expected_entry(method: Method, size: usize, n: usize, k: usize) -> f64 {
    let r = ((2 * n + 1) as f64 * (2 * k + 1) as f64).sqrt();
    match method {
        Method::LegS if n > k => -r,
        Method::LegS if n == k => -r * (n + 1) as f64 / (2 * n + 1) as f64,
        Method::LegS => 0.0,
        Method::LegT if k <= n || (k - n) % 2 == 0 => -r,
        Method::LegT => r,
        Method::FouT => {
            // 0 constant, 2m-1 cosine, 2m sine; an unpaired last cosine is decoupled
            if size % 2 == 0 && k == size - 1 && n != k {
                return 0.0;
            }
            let (cn, ck) = (n == 0 || n % 2 == 1, k == 0 || k % 2 == 1);
            match (cn, ck) {
                (true, true) if n == 0 && k == 0 => -2.0,
                (true, true) if n == 0 || k == 0 => -2.0 * SQRT_2,
                (true, true) => -4.0,
                (false, true) if n == k + 1 => 2.0 * PI * (n / 2) as f64,
                (true, false) if k == n + 1 && n > 0 => -2.0 * PI * (k / 2) as f64,
                _ => 0.0,
            }
        }
    }
}

fn expected_b(method: Method, n: usize) -> f64 {
    match method {
        Method::FouT if n == 0 => 2.0,
        Method::FouT if n % 2 == 1 => 2.0 * SQRT_2,
        Method::FouT => 0.0,
        _ => ((2 * n + 1) as f64).sqrt(),
    }
}

fn matrix_check(sys: &StateSystem) -> Check {
    let size = sys.state_size();
    let f = if sys.normalized() { 0.5 } else { 1.0 };
    let mut worst: f64 = 0.0;
    let mut dev = |got: f64, want: f64| {
        let d = (got - want).abs() / want.abs().max(1.0);
        worst = worst.max(d);
    };
    for n in 0..size {
        for k in 0..size {
            dev(sys.a()[(n, k)], f * expected_entry(sys.method(), size, n, k));
        }
        dev(sys.b()[n], f * expected_b(sys.method(), n));
    }
    Check::measure(Suite::Matrix, "A, B match the closed forms", worst, 1e-15)
}

fn gram_check(sys: &StateSystem) -> Result<Check, Failure> {
    let spec = BasisSpec::new(sys.method(), sys.state_size(), sys.normalized())?;
    let report = gram_matrix(&spec, spec.default_quad_order())?;
    let tol = if sys.method() == Method::FouT { 1e-10 } else { 1e-12 };
    Ok(Check::measure(Suite::Gram, "Gram matrix is the identity", report.max_deviation(), tol))
}

fn householder(rng: &mut Rng, n: usize) -> Matrix {
    let v: Vec<f64> = (0..n).map(|_| rng.gaussian()).collect();
    let vv: f64 = v.iter().map(|x| x * x).sum();
    Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - 2.0 * v[i] * v[j] / vv)
}

fn exact_kernel(sys: &StateSystem, t: f64) -> Result<Vec<f64>, Failure> {
    Ok(mat_exp(&sys.a().scaled(t))?.matvec(sys.b())?)
}

fn closure_checks(sys: &StateSystem, seed: u64) -> Result<Vec<Check>, Failure> {
    let mut rng = Rng::new(seed ^ 0xc105);
    let n = sys.state_size();
    let c = rng.uniform_range(0.5, 3.0);
    let sh = rng.uniform_range(-1.0, 1.0);
    let v = householder(&mut rng, n);
    let dt = 0.25;
    let len = 9;
    let ks = sample_kernels(&scale(sys.clone(), c)?, dt, len)?;
    let kh = sample_kernels(&shift(sys.clone(), sh)?, dt, len)?;
    let kv = sample_kernels(&unitary_conjugate(sys.clone(), &v)?, dt, len)?;
    let mut worst = [0.0f64; 3];
    for (k, &t) in ks.times().iter().enumerate() {
        let base = exact_kernel(sys, t)?;
        let base_ct = exact_kernel(sys, c * t)?;
        let rotated = v.matvec(&base)?;
        for i in 0..n {
            let want = [c * base_ct[i], (sh * t).exp() * base[i], rotated[i]];
            let got = [ks.values()[(i, k)], kh.values()[(i, k)], kv.values()[(i, k)]];
            for j in 0..3 {
                worst[j] = worst[j].max((got[j] - want[j]).abs() / want[j].abs().max(1.0));
            }
        }
    }
    Ok(vec![
        Check::measure(Suite::Closure, format!("scale by {c:.3}: c K(ct)"), worst[0], 1e-8),
        Check::measure(Suite::Closure, format!("shift by {sh:.3}: e^(ct) K(t)"), worst[1], 1e-8),
        Check::measure(Suite::Closure, "unitary conjugate: V K(t)", worst[2], 1e-8),
    ])
}

fn dt_check(sys: &StateSystem, dt: f64) -> Result<Check, Failure> {
    let scaled = scale(sys.clone(), dt)?;
    let mut worst: f64 = 0.0;
    for method in DiscMethod::ALL {
        let a = discretize(sys, dt, method)?;
        let b = discretize(&scaled, 1.0, method)?;
        let mag = a.a_bar().max_abs().max(1.0);
        worst = worst.max(a.a_bar().max_abs_diff(b.a_bar())? / mag);
        for (x, y) in a.b_bar().iter().zip(b.b_bar()) {
            worst = worst.max((x - y).abs() / mag);
        }
    }
    Ok(Check::measure(Suite::Dt, format!("discretize(A, B, {dt}) == discretize({dt}A, {dt}B, 1)"), worst, 1e-12))
}

/// Continuant coefficients grow factorially; past this size the comparison
/// is limited by double precision rather than the identity.
const PADE_MAX_N: usize = 8;

fn pade_check(sys: &StateSystem, seed: u64) -> Result<Check, Failure> {
    let name = "delay transfer function equals the Pade continuant";
    let n = sys.state_size();
    if sys.method() != Method::LegT {
        return Ok(Check::skip(Suite::Pade, name, "only LegT delays are Pade approximants"));
    }
    if n > PADE_MAX_N {
        return Ok(Check::skip(Suite::Pade, name, format!("compared for N <= {PADE_MAX_N} only")));
    }
    let delay = delay_readout(sys.clone())?;
    let ratio = pade_exp_continuants(n)?.pop().expect("n >= 1 continuants");
    // the delay readout of the halved system reads a window of length 2
    let w = if sys.normalized() { 2.0 } else { 1.0 };
    let mut rng = Rng::new(seed ^ 0x9ade);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let s = ComplexValue::new(rng.uniform_range(0.1, 5.0), rng.uniform_range(-5.0, 5.0));
        let h = transfer_function(&delay, s)?;
        let r = ratio.eval(s * w);
        worst = worst.max((h - r).norm() / r.norm());
    }
    Ok(Check::measure(Suite::Pade, name, worst, 1e-6))
}

fn kernel_check(sys: &StateSystem) -> Result<Check, Failure> {
    let name = "e^(tA)B equals basis times measure";
    if sys.method() != Method::LegS {
        return Ok(Check::skip(Suite::Kernel, name, "exact at finite N for LegS only"));
    }
    let spec = BasisSpec::new(sys.method(), sys.state_size(), sys.normalized())?;
    let points = 200;
    let dt = 5.0 / (points - 1) as f64;
    let table = sample_kernels(sys, dt, points)?;
    let mut worst: f64 = 0.0;
    for (k, &t) in table.times().iter().enumerate() {
        let w = measure_eval(&spec, t)?;
        for n in 0..sys.state_size() {
            worst = worst.max((table.values()[(n, k)] - basis_eval(&spec, n, t)? * w).abs());
        }
    }
    Ok(Check::measure(Suite::Kernel, name, worst, 1e-6))
}
