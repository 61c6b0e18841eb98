//! Matrix exponential by scaling and squaring around a degree-13 diagonal
//! Padé approximant.
//!
//! The HiPPO matrices have badly conditioned eigenvectors, so nothing here
//! goes through an eigendecomposition.

use super::linalg::solve_linear;
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Numerator coefficients of the [13/13] Padé approximant of `e^x`.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the [13/13] approximant meets double precision
/// backward error without scaling.
const THETA_13: f64 = 5.371920351148152;

/// Squarings beyond this are treated as overflow of the input norm.
const MAX_SQUARINGS: i32 = 1000;

pub fn mat_exp(m: &Matrix) -> Result<Matrix> {
    let n = m.require_square()?;
    if !m.is_finite() {
        return Err(Error::Overflow("matrix exponential of non-finite input".into()));
    }
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let norm = m.norm_1();
    if norm == 0.0 {
        return Ok(Matrix::identity(n));
    }
    let squarings = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    if squarings > MAX_SQUARINGS {
        return Err(Error::Overflow(format!("matrix norm {norm:e} is too large to exponentiate")));
    }
    let a = m.scaled(0.5_f64.powi(squarings));

    let ident = Matrix::identity(n);
    let a2 = a.matmul(&a)?;
    let a4 = a2.matmul(&a2)?;
    let a6 = a2.matmul(&a4)?;
    let b = &PADE13;

    let u_inner = a6.scaled(b[13]).add_scaled(b[11], &a4)?.add_scaled(b[9], &a2)?;
    let u = a6
        .matmul(&u_inner)?
        .add_scaled(b[7], &a6)?
        .add_scaled(b[5], &a4)?
        .add_scaled(b[3], &a2)?
        .add_scaled(b[1], &ident)?;
    let u = a.matmul(&u)?;

    let v_inner = a6.scaled(b[12]).add_scaled(b[10], &a4)?.add_scaled(b[8], &a2)?;
    let v = a6
        .matmul(&v_inner)?
        .add_scaled(b[6], &a6)?
        .add_scaled(b[4], &a4)?
        .add_scaled(b[2], &a2)?
        .add_scaled(b[0], &ident)?;

    // r = (v - u)^{-1} (v + u)
    let p = v.add_scaled(1.0, &u)?;
    let q = v.add_scaled(-1.0, &u)?;
    let mut r = solve_linear(&q, &p)?;
    for _ in 0..squarings {
        r = r.matmul(&r)?;
        if !r.is_finite() {
            return Err(Error::Overflow("matrix exponential overflowed while squaring".into()));
        }
    }
    if !r.is_finite() {
        return Err(Error::Overflow("matrix exponential is not finite".into()));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rng;
    use proptest::prelude::*;

    /// Truncated Taylor series, the independent oracle.
    fn taylor_exp(m: &Matrix, terms: usize) -> Matrix {
        let n = m.rows();
        let mut sum = Matrix::identity(n);
        let mut term = Matrix::identity(n);
        for k in 1..terms {
            term = term.matmul(m).unwrap().scaled(1.0 / k as f64);
            sum = sum.add_scaled(1.0, &term).unwrap();
        }
        sum
    }

    fn random_matrix(rng: &mut Rng, n: usize, bound: f64) -> Matrix {
        Matrix::from_fn(n, n, |_, _| rng.uniform_range(-bound, bound))
    }

    #[test]
    fn zero_gives_identity() {
        assert_eq!(mat_exp(&Matrix::zeros(3, 3)).unwrap(), Matrix::identity(3));
    }

    #[test]
    fn diagonal_case() {
        let e = mat_exp(&Matrix::diag(&[-1.0, -2.0])).unwrap();
        assert!((e[(0, 0)] - (-1.0f64).exp()).abs() < 1e-15);
        assert!((e[(1, 1)] - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(e[(0, 1)], 0.0);
        assert_eq!(e[(1, 0)], 0.0);
    }

    #[test]
    fn matches_taylor_on_random_5x5() {
        let mut rng = Rng::new(2024);
        for _ in 0..10 {
            let m = random_matrix(&mut rng, 5, 1.0);
            let e = mat_exp(&m).unwrap();
            let t = taylor_exp(&m, 30);
            assert!(e.max_abs_diff(&t).unwrap() <= 1e-10 * t.max_abs());
        }
    }

    #[test]
    fn large_norm_uses_squaring() {
        // exp of a nilpotent-plus-diagonal 2x2 has a closed form
        let a = -30.0;
        let m = Matrix::from_rows(&[vec![a, 40.0], vec![0.0, a]]).unwrap();
        let e = mat_exp(&m).unwrap();
        let ea = a.exp();
        assert!((e[(0, 0)] - ea).abs() <= 1e-10 * ea);
        assert!((e[(0, 1)] - 40.0 * ea).abs() <= 1e-10 * 40.0 * ea);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(mat_exp(&Matrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
        assert!(matches!(mat_exp(&Matrix::diag(&[f64::NAN])), Err(Error::Overflow(_))));
        assert!(matches!(mat_exp(&Matrix::diag(&[1e6])), Err(Error::Overflow(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn inverse_pair(seed in any::<u64>(), n in 1usize..7) {
            let mut rng = Rng::new(seed);
            let mut m = random_matrix(&mut rng, n, 1.0);
            let norm = m.norm_1();
            if norm > 5.0 {
                m = m.scaled(5.0 / norm);
            }
            let prod = mat_exp(&m).unwrap().matmul(&mat_exp(&m.scaled(-1.0)).unwrap()).unwrap();
            prop_assert!(prod.max_abs_diff(&Matrix::identity(n)).unwrap() <= 1e-8);
        }

        #[test]
        fn semigroup(seed in any::<u64>(), s in 0.0f64..2.0, t in 0.0f64..2.0) {
            let mut rng = Rng::new(seed);
            let a = random_matrix(&mut rng, 4, 1.0);
            let lhs = mat_exp(&a.scaled(s + t)).unwrap();
            let rhs = mat_exp(&a.scaled(s)).unwrap().matmul(&mat_exp(&a.scaled(t)).unwrap()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-8 * lhs.max_abs().max(1.0));
        }
    }
}
