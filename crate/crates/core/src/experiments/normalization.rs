use serde::Serialize;

use crate::basis::{measure_mass, BasisSpec};
use crate::error::Result;
use crate::hippo::StateSystem;
use crate::ssm::{discretize, DiscMethod};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalizationResult {
    /// `‖x_k‖²` after each step.
    pub norms: Vec<f64>,
    pub limit: f64,
}

/// Drives the bilinear recurrence with the constant input `c`.
///
/// `B` is divided by the measure's mass first, which is one for every
/// supported family, so the state norm settles at `c²`.
pub fn normalization_experiment(sys: &StateSystem, c: f64, dt: f64, steps: usize) -> Result<NormalizationResult> {
    let mass = measure_mass(&BasisSpec::new(sys.method(), sys.state_size(), sys.normalized())?);
    let disc = discretize(sys, dt, DiscMethod::Bilinear)?;
    let n = sys.state_size();
    let b: Vec<f64> = disc.b_bar().iter().map(|v| v / mass).collect();
    let mut x = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut norms = Vec::with_capacity(steps);
    for _ in 0..steps {
        disc.a_bar().matvec_into(&x, &mut next);
        for (o, &bi) in next.iter_mut().zip(&b) {
            *o += bi * c;
        }
        std::mem::swap(&mut x, &mut next);
        norms.push(x.iter().map(|v| v * v).sum());
    }
    let limit = norms.last().copied().unwrap_or(0.0);
    Ok(NormalizationResult { norms, limit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hippo::{make_legs, make_legt, unitary_conjugate};
    use crate::numerics::Matrix;

    #[test]
    fn scalar_limit() {
        let r = normalization_experiment(&make_legs(1).unwrap(), 1.0, 0.01, 3000).unwrap();
        assert!((r.limit - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_input_stays_zero() {
        let r = normalization_experiment(&make_legs(6).unwrap(), 0.0, 0.01, 100).unwrap();
        assert!(r.norms.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn normalized_window_limit() {
        let r = normalization_experiment(&make_legt(8, true).unwrap(), 1.5, 0.01, 1000).unwrap();
        assert!((r.limit - 2.25).abs() < 1e-6, "{}", r.limit);
    }

    #[test]
    fn invariant_under_rotation() {
        let sys = make_legs(3).unwrap();
        let (c, s) = (0.6, 0.8);
        let v = Matrix::from_rows(&[vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let a = normalization_experiment(&sys, 2.0, 0.01, 500).unwrap();
        let b = normalization_experiment(&unitary_conjugate(sys, &v).unwrap(), 2.0, 0.01, 500).unwrap();
        for (x, y) in a.norms.iter().zip(&b.norms) {
            assert!((x - y).abs() <= 1e-9);
        }
    }
}
