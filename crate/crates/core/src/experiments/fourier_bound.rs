use std::f64::consts::PI;

use serde::Serialize;

use crate::basis::{basis_eval_all, BasisSpec};
use crate::error::{invalid, Result};
use crate::hippo::Method;
use crate::numerics::Rng;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub lipschitz_l: f64,
    pub epsilon: f64,
    pub derivative_order: usize,
    pub n_required: usize,
    pub measured_error: f64,
    pub passed: bool,
}

/// Grid points of the sampled test kernels on `[0, 1]`.
const GRID: usize = 4096;
/// Pieces of the piecewise-constant top derivative.
const PIECES: usize = 64;

/// A kernel sampled on a uniform grid of `[0, 1]`, endpoints included.
#[derive(Clone, Debug, PartialEq)]
pub struct TestKernel {
    values: Vec<f64>,
}

fn integrate(start: f64, slope: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(slope.len());
    let mut acc = start;
    out.push(acc);
    for w in slope.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

impl TestKernel {
    pub fn from_fn(f: impl Fn(f64) -> f64) -> Self {
        Self { values: (0..=GRID).map(|i| f(i as f64 / GRID as f64)).collect() }
    }

    /// Random kernel whose derivatives of order `1..=k` stay within `[-l, l]`.
    ///
    /// The top derivative is piecewise constant and uniform in `[-l, l]`;
    /// each lower derivative integrates it from a random start and is clipped.
    pub fn random(l: f64, k: usize, seed: u64) -> Result<Self> {
        if !(l >= 0.0 && l.is_finite()) || k == 0 {
            return Err(invalid("need a finite bound and derivative order at least 1"));
        }
        let mut rng = Rng::new(seed);
        let h = 1.0 / GRID as f64;
        let pieces: Vec<f64> = (0..PIECES).map(|_| rng.uniform_range(-l, l)).collect();
        let mut deriv: Vec<f64> = (0..=GRID).map(|i| pieces[(i * PIECES / GRID).min(PIECES - 1)]).collect();
        for _ in 1..k {
            let start = rng.uniform_range(-l, l);
            deriv = integrate(start, &deriv, h).into_iter().map(|v| v.clamp(-l, l)).collect();
        }
        let start = rng.uniform_range(-1.0, 1.0);
        Ok(Self { values: integrate(start, &deriv, h) })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn trapezoid(f: &[f64]) -> f64 {
    let h = 1.0 / (f.len() - 1) as f64;
    h * (f.iter().sum::<f64>() - 0.5 * (f[0] + f[f.len() - 1]))
}

/// L2 distance on `[0, 1]` between the kernel and its projection onto the
/// first `n` truncated Fourier functions.
pub fn fourier_l2_error(kernel: &TestKernel, n: usize) -> Result<f64> {
    let spec = BasisSpec::new(Method::FouT, n, false)?;
    let len = kernel.values.len();
    let table: Vec<Vec<f64>> = (0..len)
        .map(|i| basis_eval_all(&spec, (i as f64 / (len - 1) as f64).min(1.0)))
        .collect::<Result<_>>()?;
    let mut resid = kernel.values.clone();
    for j in 0..n {
        let prod: Vec<f64> = (0..len).map(|i| kernel.values[i] * table[i][j]).collect();
        let c = trapezoid(&prod);
        for (r, row) in resid.iter_mut().zip(&table) {
            *r -= c * row[j];
        }
    }
    let sq: Vec<f64> = resid.iter().map(|r| r * r).collect();
    Ok(trapezoid(&sq).max(0.0).sqrt())
}

/// Smallest FouT state size guaranteeing projection error below `epsilon` for a kernel
/// with `k` derivatives bounded by `l`.
pub fn fout_required_size(l: f64, epsilon: f64, k: usize) -> Result<usize> {
    if !(l > 0.0 && epsilon > 0.0) || k == 0 {
        return Err(invalid("bound and tolerance must be positive, order at least 1"));
    }
    let base = l / (PI.powi(k as i32) * epsilon);
    let exponent = 2.0 / (2.0 * k as f64 - 1.0);
    Ok((base.powf(exponent) + 2.0).ceil() as usize)
}

pub fn fout_bound_check(l: f64, epsilon: f64, k: usize, seed: u64) -> Result<BoundCheck> {
    let n_required = fout_required_size(l, epsilon, k)?;
    let kernel = TestKernel::random(l, k, seed)?;
    let measured_error = fourier_l2_error(&kernel, n_required)?;
    Ok(BoundCheck {
        lipschitz_l: l,
        epsilon,
        derivative_order: k,
        n_required,
        measured_error,
        passed: measured_error <= epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn required_size_examples() {
        assert_eq!(fout_required_size(1.0, 0.1, 1).unwrap(), 13);
        assert!(fout_required_size(0.0, 0.1, 1).is_err());
        assert!(fout_required_size(1.0, 0.1, 0).is_err());
        assert!(fout_required_size(1.0, 10.0, 3).unwrap() >= 3);
    }

    #[test]
    fn constant_kernel_is_exact() {
        let k = TestKernel::from_fn(|_| 0.7);
        for n in [1, 2, 5] {
            assert!(fourier_l2_error(&k, n).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn basis_member_is_exact() {
        let k = TestKernel::from_fn(|t| 2f64.sqrt() * (4.0 * PI * t).sin());
        assert!(fourier_l2_error(&k, 5).unwrap() < 1e-6);
        assert!(fourier_l2_error(&k, 4).unwrap() > 0.9);
    }

    #[test]
    fn random_kernels_respect_derivative_bound() {
        for k in [1, 2] {
            let kern = TestKernel::random(1.0, k, 17).unwrap();
            let h = 1.0 / GRID as f64;
            let worst = kern.values().windows(2).map(|w| ((w[1] - w[0]) / h).abs()).fold(0.0, f64::max);
            assert!(worst <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn bound_holds_for_one_seed() {
        let b = fout_bound_check(1.0, 0.1, 1, 3).unwrap();
        assert_eq!(b.n_required, 13);
        assert!(b.passed, "{b:?}");
    }
}
