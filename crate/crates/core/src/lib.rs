//! HiPPO state space models at desk scale.
//!
//! The crate builds the HiPPO-LegS/LegT/FouT state matrices, samples their
//! convolution kernels `e^{tA}B`, discretizes them, and provides the analytic
//! bases and measures those kernels factor into. The [`experiments`] module
//! runs the reconstruction, delay, normalization and approximation studies
//! that tie the two sides together.

pub mod basis;
pub mod error;
pub mod experiments;
pub mod hippo;
pub mod numerics;
pub mod ssm;

pub use basis::{BasisSpec, GramReport};
pub use error::{Error, Result};
pub use hippo::{Method, StateSystem, Transform};
pub use numerics::{ComplexMatrix, ComplexValue, Matrix, QuadratureRule, RationalFn, Rng};
pub use ssm::{DiscMethod, DiscreteSystem, KernelTable, Signal};
