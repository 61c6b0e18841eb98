//! Rational functions and the continued-fraction route to the Padé
//! approximants of `e^{-s}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Ratio of two real polynomials, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalFn {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
}

fn trim(mut c: Vec<f64>) -> Vec<f64> {
    while c.len() > 1 && c.last() == Some(&0.0) {
        c.pop();
    }
    c
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

impl RationalFn {
    pub fn new(numerator: Vec<f64>, denominator: Vec<f64>) -> Result<Self> {
        let numerator = trim(numerator);
        let denominator = trim(denominator);
        match denominator.first() {
            Some(&d0) if d0 != 0.0 && d0.is_finite() => {}
            _ => return Err(invalid("denominator constant term must be nonzero")),
        }
        if numerator.is_empty() {
            return Err(invalid("numerator needs at least one coefficient"));
        }
        Ok(Self { numerator, denominator })
    }

    /// Rescales so the denominator's constant term is one.
    pub fn normalized(&self) -> Self {
        let d0 = self.denominator[0];
        Self {
            numerator: self.numerator.iter().map(|c| c / d0).collect(),
            denominator: self.denominator.iter().map(|c| c / d0).collect(),
        }
    }

    pub fn numerator_degree(&self) -> usize {
        self.numerator.len() - 1
    }

    pub fn denominator_degree(&self) -> usize {
        self.denominator.len() - 1
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        horner(&self.numerator, s) / horner(&self.denominator, s)
    }

    pub fn eval_real(&self, s: f64) -> f64 {
        self.eval(Complex64::new(s, 0.0)).re
    }
}

fn poly_add_scaled(a: &[f64], b: &[f64], c: f64, shift: usize) -> Vec<f64> {
    // a + c * s^shift * b
    let len = a.len().max(b.len() + shift);
    let mut out = vec![0.0; len];
    out[..a.len()].copy_from_slice(a);
    for (i, &v) in b.iter().enumerate() {
        out[i + shift] += c * v;
    }
    out
}

/// Partial numerator coefficient (of `s`) of the continued fraction
/// `e^s = 1 + s/(1 - (s/2)/(1 + (s/6)/(1 - (s/6)/(1 + (s/10)/(1 - ...)))))`.
fn cf_coefficient(k: usize) -> f64 {
    match k {
        1 => 1.0,
        k if k % 2 == 0 => -1.0 / (2.0 * (k - 1) as f64),
        k => 1.0 / (2.0 * k as f64),
    }
}

/// Continuants of the exponential's continued fraction, one pair per step.
///
/// Entry `k - 1` is the `[k-1/k]` Padé approximant of `e^{-s}`, obtained as
/// the reciprocal of the `(2k-1)`-th convergent of the fraction for `e^{s}`.
/// Numerators and denominators follow the fundamental recurrence
/// `X_j = X_{j-1} + a_j s X_{j-2}`.
pub fn pade_exp_continuants(n: usize) -> Result<Vec<RationalFn>> {
    if n == 0 {
        return Err(invalid("need at least one continuant step"));
    }
    // (numerator, denominator) of the e^s convergents at j-2 and j-1
    let mut num_prev: Vec<f64> = vec![1.0];
    let mut den_prev: Vec<f64> = vec![0.0];
    let mut num = vec![1.0];
    let mut den = vec![1.0];
    let mut out = Vec::with_capacity(n);
    for j in 1..=2 * n - 1 {
        let a = cf_coefficient(j);
        let num_next = poly_add_scaled(&num, &num_prev, a, 1);
        let den_next = poly_add_scaled(&den, &den_prev, a, 1);
        num_prev = std::mem::replace(&mut num, num_next);
        den_prev = std::mem::replace(&mut den, den_next);
        if j % 2 == 1 {
            // e^{-s} ≈ 1 / (num/den)
            out.push(RationalFn::new(den.clone(), num.clone())?.normalized());
        }
    }
    Ok(out)
}
