//! Analytic bases `p_n` and measures `ω` behind each HiPPO family.
//!
//! Time arguments are ages: `t = 0` is the present and larger `t` reaches
//! further into the past. The SSM kernels factor as `K_n(t) = p_n(t)·ω(t)`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hippo::Method;
use crate::numerics::{gauss_legendre, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSpec {
    method: Method,
    state_size: usize,
    normalized: bool,
}

impl BasisSpec {
    pub fn new(method: Method, state_size: usize, normalized: bool) -> Result<Self> {
        if state_size == 0 {
            return Err(invalid("state size must be at least 1"));
        }
        if method == Method::LegS && normalized {
            return Err(Error::UnsupportedMethod {
                method: method.to_string(),
                reason: "LegS has no halved variant".into(),
            });
        }
        Ok(Self { method, state_size, normalized })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn state_size(&self) -> usize {
        self.state_size
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    /// Support length of the finite-window measures; `None` for LegS.
    pub fn window(&self) -> Option<f64> {
        match self.method {
            Method::LegS => None,
            _ if self.normalized => Some(2.0),
            _ => Some(1.0),
        }
    }

    /// Quadrature order used when none is requested.
    pub fn default_quad_order(&self) -> usize {
        16 * self.state_size
    }
}

/// Diagnostics of a numerically computed Gram matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub gram: Matrix,
    pub max_off_diagonal: f64,
    pub max_diagonal_deviation: f64,
    pub quadrature_order: usize,
}

impl GramReport {
    /// `‖G − I‖∞` entrywise.
    pub fn max_deviation(&self) -> f64 {
        self.max_off_diagonal.max(self.max_diagonal_deviation)
    }
}

/// Classical `P_n(z)` by the upward three-term recurrence.
fn legendre_classical(n: usize, z: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return 1.0;
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Legendre polynomial shifted to `[0, 1]` and scaled to unit norm there.
pub fn legendre_shifted(n: usize, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&y) {
        return Err(invalid(format!("shifted Legendre argument {y} is outside [0, 1]")));
    }
    Ok(((2 * n + 1) as f64).sqrt() * legendre_classical(n, 2.0 * y - 1.0))
}

fn fourier(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let m = n.div_ceil(2) as f64;
    let phase = 2.0 * PI * m * x;
    if n % 2 == 1 { SQRT_2 * phase.cos() } else { SQRT_2 * phase.sin() }
}

pub fn basis_eval(spec: &BasisSpec, n: usize, t: f64) -> Result<f64> {
    if n >= spec.state_size {
        return Err(invalid(format!("basis index {n} out of range for N = {}", spec.state_size)));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("age must be finite and non-negative, got {t}")));
    }
    match spec.window() {
        None => legendre_shifted(n, (-t).exp()),
        Some(w) if t > w => Ok(0.0),
        Some(w) => {
            let x = t / w;
            match spec.method {
                // the newest sample sits at the right end of [0, 1]
                Method::LegT => legendre_shifted(n, 1.0 - x),
                _ => Ok(fourier(n, x)),
            }
        }
    }
}

/// All `p_0(t) … p_{N-1}(t)` at once, sharing one recurrence.
pub fn basis_eval_all(spec: &BasisSpec, t: f64) -> Result<Vec<f64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("age must be finite and non-negative, got {t}")));
    }
    let n = spec.state_size;
    let y = match spec.window() {
        None => (-t).exp(),
        Some(w) if t > w => return Ok(vec![0.0; n]),
        Some(w) if spec.method == Method::FouT => {
            return Ok((0..n).map(|k| fourier(k, t / w)).collect());
        }
        Some(w) => 1.0 - t / w,
    };
    let z = 2.0 * y - 1.0;
    let mut out = Vec::with_capacity(n);
    let (mut p0, mut p1) = (1.0, z);
    for k in 0..n {
        let p = match k {
            0 => 1.0,
            1 => z,
            _ => {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
                p2
            }
        };
        out.push(((2 * k + 1) as f64).sqrt() * p);
    }
    Ok(out)
}

pub fn measure_eval(spec: &BasisSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(invalid(format!("age must be non-negative, got {t}")));
    }
    Ok(match spec.window() {
        None => (-t).exp(),
        Some(w) if t <= w => 1.0 / w,
        Some(_) => 0.0,
    })
}

/// Total mass `∫ω`; every supported measure is a probability measure.
pub fn measure_mass(_spec: &BasisSpec) -> f64 {
    1.0
}

pub fn gram_matrix(spec: &BasisSpec, quad_order: usize) -> Result<GramReport> {
    let n = spec.state_size;
    if quad_order < n {
        return Err(invalid(format!("quadrature order {quad_order} is below the state size {n}")));
    }
    let rule = gauss_legendre(quad_order)?;
    // tabulate every basis function at the nodes, with the measure folded in
    let (lo, hi) = match spec.window() {
        None => (0.0, 1.0),
        Some(w) => (0.0, w),
    };
    let h = hi - lo;
    let mut table = vec![vec![0.0; rule.order()]; n];
    let mut weights = vec![0.0; rule.order()];
    for (q, (&x, &wq)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
        let t = lo + h * x;
        weights[q] = match spec.window() {
            // u = e^{-t} turns ∫ p_n p_m e^{-t} dt into ∫₀¹ L_n L_m du
            None => wq,
            Some(_) => wq * h * measure_eval(spec, t)?,
        };
        for (k, row) in table.iter_mut().enumerate() {
            row[q] = match spec.window() {
                None => legendre_shifted(k, t)?,
                Some(_) => basis_eval(spec, k, t)?,
            };
        }
    }
    let mut gram = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = (0..rule.order()).map(|q| weights[q] * table[i][q] * table[j][q]).sum();
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let mut max_off_diagonal: f64 = 0.0;
    let mut max_diagonal_deviation: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                max_diagonal_deviation = max_diagonal_deviation.max((gram[(i, i)] - 1.0).abs());
            } else {
                max_off_diagonal = max_off_diagonal.max(gram[(i, j)].abs());
            }
        }
    }
    Ok(GramReport { gram, max_off_diagonal, max_diagonal_deviation, quadrature_order: quad_order })
}

/// First moment `∫tω / ∫ω` of the measure.
pub fn timescale(spec: &BasisSpec) -> f64 {
    match spec.window() {
        None => 1.0,
        Some(w) => w / 2.0,
    }
}

/// Coefficients of `y·L_n'(y)` in the basis `L_0 … L_n`.
pub fn legendre_derivative_coeffs(n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let sn = ((2 * n + 1) as f64).sqrt();
    let mut c: Vec<f64> = (0..n).map(|k| sn * ((2 * k + 1) as f64).sqrt()).collect();
    c.push(n as f64);
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m: Method, n: usize, norm: bool) -> BasisSpec {
        BasisSpec::new(m, n, norm).unwrap()
    }

    #[test]
    fn shifted_legendre_values() {
        for y in [0.0, 0.3, 1.0] {
            assert_eq!(legendre_shifted(0, y).unwrap(), 1.0);
        }
        for n in 0..=8 {
            let s = ((2 * n + 1) as f64).sqrt();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((legendre_shifted(n, 1.0).unwrap() - s).abs() < 1e-13);
            assert!((legendre_shifted(n, 0.0).unwrap() - sign * s).abs() < 1e-13);
        }
        for y in [0.1, 0.5, 0.9] {
            assert!((legendre_shifted(1, y).unwrap() - 3f64.sqrt() * (2.0 * y - 1.0)).abs() < 1e-15);
        }
        assert!(legendre_shifted(2, 1.5).is_err());
        assert!(legendre_shifted(2, -0.1).is_err());
    }

    #[test]
    fn basis_examples() {
        let legs = spec(Method::LegS, 4, false);
        for t in [0.0, 1.0, 7.0] {
            assert_eq!(basis_eval(&legs, 0, t).unwrap(), 1.0);
        }
        let legt = spec(Method::LegT, 4, false);
        assert_eq!(basis_eval(&legt, 0, 1.5).unwrap(), 0.0);
        let fout = spec(Method::FouT, 5, false);
        for t in [0.0, 0.5, 1.0] {
            assert_eq!(basis_eval(&fout, 0, t).unwrap(), 1.0);
        }
        assert!(basis_eval(&fout, 5, 0.5).is_err());
        assert!(basis_eval(&fout, 0, -1.0).is_err());
    }

    #[test]
    fn sine_functions_vanish_at_window_ends() {
        for norm in [false, true] {
            let s = spec(Method::FouT, 9, norm);
            let w = s.window().unwrap();
            for n in (2..9).step_by(2) {
                assert!(basis_eval(&s, n, 0.0).unwrap().abs() < 1e-15);
                assert!(basis_eval(&s, n, w).unwrap().abs() < 1e-13);
            }
        }
    }

    #[test]
    fn measure_examples() {
        assert_eq!(measure_eval(&spec(Method::LegS, 1, false), 0.0).unwrap(), 1.0);
        let f = spec(Method::FouT, 3, false);
        assert_eq!(measure_eval(&f, 0.5).unwrap(), 1.0);
        assert_eq!(measure_eval(&f, 1.5).unwrap(), 0.0);
        assert_eq!(measure_eval(&spec(Method::LegT, 3, true), 1.5).unwrap(), 0.5);
    }

    #[test]
    fn measures_have_unit_mass() {
        let rule = gauss_legendre(200).unwrap();
        for s in [
            spec(Method::LegS, 1, false),
            spec(Method::LegT, 1, false),
            spec(Method::LegT, 1, true),
            spec(Method::FouT, 1, true),
        ] {
            let hi = s.window().unwrap_or(60.0);
            let mass = rule.integrate(0.0, hi, |t| measure_eval(&s, t).unwrap());
            assert!((mass - 1.0).abs() < 1e-12, "{s:?}: {mass}");
            assert_eq!(measure_mass(&s), 1.0);
        }
    }

    #[test]
    fn gram_examples() {
        let g = gram_matrix(&spec(Method::LegT, 4, false), 32).unwrap();
        assert!(g.max_deviation() <= 1e-12);
        let g = gram_matrix(&spec(Method::LegS, 8, false), 64).unwrap();
        assert!(g.max_deviation() <= 1e-12);
        let g = gram_matrix(&spec(Method::FouT, 9, false), 128).unwrap();
        assert!(g.max_deviation() <= 1e-10);
        assert!(gram_matrix(&spec(Method::FouT, 9, false), 8).is_err());
    }

    #[test]
    fn gram_is_symmetric() {
        let g = gram_matrix(&spec(Method::FouT, 7, true), 20).unwrap();
        assert_eq!(g.gram, g.gram.transpose());
    }

    #[test]
    fn gram_improves_with_order() {
        let s = spec(Method::FouT, 9, false);
        let coarse = gram_matrix(&s, 9).unwrap().max_deviation();
        let fine = gram_matrix(&s, 64).unwrap().max_deviation();
        assert!(fine < coarse);
    }

    #[test]
    fn timescales() {
        assert_eq!(timescale(&spec(Method::LegS, 2, false)), 1.0);
        assert_eq!(timescale(&spec(Method::FouT, 2, false)), 0.5);
        assert_eq!(timescale(&spec(Method::LegT, 2, true)), 1.0);
    }

    #[test]
    fn derivative_coefficients() {
        assert!(legendre_derivative_coeffs(0).is_empty());
        let c = legendre_derivative_coeffs(1);
        assert!((c[0] - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(c[1], 1.0);
    }

    #[test]
    fn derivative_coefficients_match_projection() {
        // project y·L_3'(y) onto L_k with a central difference for the derivative
        let rule = gauss_legendre(16).unwrap();
        let n = 3;
        let h = 1e-5;
        let deriv = |y: f64| {
            let z = |v: f64| ((2 * n + 1) as f64).sqrt() * legendre_classical(n, 2.0 * v - 1.0);
            (z(y + h) - z(y - h)) / (2.0 * h)
        };
        let coeffs = legendre_derivative_coeffs(n);
        for (k, &want) in coeffs.iter().enumerate() {
            let got = rule.integrate(0.0, 1.0, |y| y * deriv(y) * legendre_shifted(k, y).unwrap());
            assert!((got - want).abs() < 1e-6, "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn batch_evaluation_matches_single() {
        for s in [spec(Method::LegS, 9, false), spec(Method::LegT, 9, true), spec(Method::FouT, 9, false)] {
            for t in [0.0, 0.2, 0.77, 1.6, 3.0] {
                let all = basis_eval_all(&s, t).unwrap();
                for (k, v) in all.iter().enumerate() {
                    assert!((v - basis_eval(&s, k, t).unwrap()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(BasisSpec::new(Method::LegT, 0, false).is_err());
        assert!(BasisSpec::new(Method::LegS, 3, true).is_err());
    }
}
