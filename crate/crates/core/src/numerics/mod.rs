//! Dense numerical kernels shared by the model and experiment code.

mod expm;
mod fft;
mod linalg;
mod matrix;
mod pade;
mod quadrature;
mod rng;

pub use expm::mat_exp;
pub use fft::fft_convolve;
pub use linalg::{complex_solve, solve_linear, Lu, Scalar};
pub use matrix::{ComplexMatrix, Matrix};
pub use pade::{pade_exp_continuants, RationalFn};
pub use quadrature::{gauss_legendre, QuadratureRule};
pub use rng::{rng_gaussian, Rng};

pub type ComplexValue = num_complex::Complex64;
