//! LU factorization with partial pivoting, over real or complex scalars.

use std::ops::{Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::matrix::{ComplexMatrix, Matrix};
use crate::error::{Error, Result};

/// Scalar field the LU solver runs over.
pub trait Scalar:
    Copy + Zero + One + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Packed LU factors `P·M = L·U` of a square matrix.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(m: &Matrix<T>) -> Result<Self> {
        let n = m.require_square()?;
        let mut lu = m.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = lu.iter().fold(0.0_f64, |acc, x| acc.max(x.modulus()));
        if !scale.is_finite() {
            return Err(Error::Overflow("non-finite entry in linear system".into()));
        }
        let tiny = (n.max(1) as f64) * f64::EPSILON * scale;

        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[i * n + k].modulus()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= tiny || scale == 0.0 {
                return Err(Error::Singular { column: k, pivot: pmax });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            let (upper, lower) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &upper[k * n..(k + 1) * n];
            for row in lower.chunks_exact_mut(n) {
                let factor = row[k] / pivot;
                row[k] = factor;
                if factor.modulus() == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    row[j] = row[j] - factor * pivot_row[j];
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves for a row-major right-hand side with `nrhs` columns.
    pub fn solve_in_place(&self, rhs: &[T], nrhs: usize) -> Vec<T> {
        let n = self.n;
        debug_assert_eq!(rhs.len(), n * nrhs);
        let mut x: Vec<T> = Vec::with_capacity(n * nrhs);
        for &p in &self.perm {
            x.extend_from_slice(&rhs[p * nrhs..(p + 1) * nrhs]);
        }
        // forward substitution with unit lower triangle
        for i in 0..n {
            let (done, rest) = x.split_at_mut(i * nrhs);
            let xi = &mut rest[..nrhs];
            for k in 0..i {
                let l = self.lu[i * n + k];
                if l.modulus() == 0.0 {
                    continue;
                }
                let xk = &done[k * nrhs..(k + 1) * nrhs];
                for (a, &b) in xi.iter_mut().zip(xk) {
                    *a = *a - l * b;
                }
            }
        }
        // back substitution
        for i in (0..n).rev() {
            let (head, tail) = x.split_at_mut((i + 1) * nrhs);
            let xi = &mut head[i * nrhs..];
            for k in i + 1..n {
                let u = self.lu[i * n + k];
                if u.modulus() == 0.0 {
                    continue;
                }
                let xk = &tail[(k - i - 1) * nrhs..(k - i) * nrhs];
                for (a, &b) in xi.iter_mut().zip(xk) {
                    *a = *a - u * b;
                }
            }
            let d = self.lu[i * n + i];
            for a in xi.iter_mut() {
                *a = *a / d;
            }
        }
        x
    }
}

/// Solves `m · x = rhs` for a (possibly multi-column) right-hand side.
pub fn solve_linear(m: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    let n = m.require_square()?;
    if rhs.rows() != n {
        return Err(Error::Dimension(format!("rhs has {} rows, system has {n}", rhs.rows())));
    }
    if !m.is_finite() || !rhs.is_finite() {
        return Err(Error::InvalidArgument("non-finite entries in linear system".into()));
    }
    let lu = Lu::factor(m)?;
    Matrix::from_vec(n, rhs.cols(), lu.solve_in_place(rhs.as_slice(), rhs.cols()))
}

/// Solves `m · x = rhs` over the complex numbers.
pub fn complex_solve(m: &ComplexMatrix, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = m.require_square()?;
    if rhs.len() != n {
        return Err(Error::Dimension(format!("rhs has length {}, system has {n}", rhs.len())));
    }
    if m.as_slice().iter().chain(rhs).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument("non-finite entries in linear system".into()));
    }
    Ok(Lu::factor(m)?.solve_in_place(rhs, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rng;

    fn residual_inf(m: &Matrix, x: &Matrix, rhs: &Matrix) -> f64 {
        m.matmul(x).unwrap().max_abs_diff(rhs).unwrap()
    }

    #[test]
    fn identity_system_returns_rhs() {
        let b = Matrix::column(&[1.0, -2.0, 3.5]);
        let x = solve_linear(&Matrix::identity(3), &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn diagonal_system() {
        let x = solve_linear(&Matrix::diag(&[2.0, 4.0]), &Matrix::column(&[2.0, 4.0])).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn random_well_conditioned_residual() {
        let mut rng = Rng::new(11);
        let n = 8;
        // diagonally dominant keeps the condition number modest
        let m = Matrix::from_fn(n, n, |i, j| {
            let v = rng.uniform_range(-1.0, 1.0);
            if i == j { v + 10.0 } else { v }
        });
        let rhs = Matrix::from_fn(n, 3, |_, _| rng.uniform_range(-1.0, 1.0));
        let x = solve_linear(&m, &rhs).unwrap();
        assert!(residual_inf(&m, &x, &rhs) <= 1e-9 * rhs.max_abs());
    }

    #[test]
    fn needs_pivoting() {
        let m = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let x = solve_linear(&m, &Matrix::column(&[3.0, 7.0])).unwrap();
        assert_eq!(x.as_slice(), &[7.0, 3.0]);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(solve_linear(&m, &Matrix::column(&[1.0, 1.0])), Err(Error::Singular { .. })));
        assert!(matches!(
            solve_linear(&Matrix::zeros(2, 2), &Matrix::column(&[1.0, 1.0])),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            solve_linear(&Matrix::zeros(2, 3), &Matrix::column(&[1.0, 1.0])),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            solve_linear(&Matrix::identity(2), &Matrix::column(&[1.0])),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn complex_scalar_case() {
        let s = Complex64::new(0.3, 2.0);
        let a = -1.5;
        let m = ComplexMatrix::from_fn(1, 1, |_, _| s - a);
        let b = Complex64::new(2.0, -1.0);
        let x = complex_solve(&m, &[b]).unwrap();
        assert!((x[0] - b / (s - a)).norm() < 1e-15);
    }

    #[test]
    fn complex_identity_at_zero() {
        let rhs = vec![Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5)];
        let x = complex_solve(&ComplexMatrix::identity(2), &rhs).unwrap();
        assert_eq!(x, rhs);
    }

    #[test]
    fn complex_random_residual() {
        let mut rng = Rng::new(5);
        let n = 4;
        let m = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0))
        });
        let rhs: Vec<_> = (0..n)
            .map(|_| Complex64::new(rng.uniform_range(-1.0, 1.0), rng.uniform_range(-1.0, 1.0)))
            .collect();
        let x = complex_solve(&m, &rhs).unwrap();
        let scale = rhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..n {
            let r: Complex64 = (0..n).map(|j| m[(i, j)] * x[j]).sum::<Complex64>() - rhs[i];
            assert!(r.norm() <= 1e-9 * scale);
        }
    }
}
