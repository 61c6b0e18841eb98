use hippo_core::basis::{basis_eval, gram_matrix, measure_eval};
use hippo_core::hippo::{delay_readout, scale, shift, unitary_conjugate};
use hippo_core::numerics::{mat_exp, pade_exp_continuants};
use hippo_core::ssm::{discretize, transfer_function};
use hippo_core::{BasisSpec, ComplexValue, DiscMethod, Matrix, Method, StateSystem};
use proptest::prelude::*;

fn kernel_at(sys: &StateSystem, t: f64) -> Vec<f64> {
    mat_exp(&sys.a().scaled(t)).unwrap().matvec(sys.b()).unwrap()
}

fn method() -> impl Strategy<Value = Method> {
    prop_oneof![Just(Method::LegS), Just(Method::LegT), Just(Method::FouT)]
}

fn build(method: Method, n: usize, normalized: bool) -> StateSystem {
    StateSystem::build(method, n, normalized && method != Method::LegS).unwrap()
}

fn reflection(v: &[f64]) -> Matrix {
    let vv: f64 = v.iter().map(|x| x * x).sum();
    Matrix::from_fn(v.len(), v.len(), |i, j| if i == j { 1.0 } else { 0.0 } - 2.0 * v[i] * v[j] / vv)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scaling_speeds_up_the_kernel(m in method(), n in 1usize..12, norm: bool, c in 0.2f64..4.0, t in 0.0f64..2.0) {
        let sys = build(m, n, norm);
        let got = kernel_at(&scale(sys.clone(), c).unwrap(), t);
        let want = kernel_at(&sys, c * t);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - c * w).abs() <= 1e-9 * (1.0 + w.abs() * c));
        }
    }

    #[test]
    fn shifting_tilts_the_kernel(m in method(), n in 1usize..12, norm: bool, s in -1.0f64..1.0, t in 0.0f64..2.0) {
        let sys = build(m, n, norm);
        let got = kernel_at(&shift(sys.clone(), s).unwrap(), t);
        for (g, w) in got.iter().zip(kernel_at(&sys, t)) {
            prop_assert!((g - (s * t).exp() * w).abs() <= 1e-9 * (1.0 + w.abs()));
        }
    }

    #[test]
    fn conjugation_commutes_with_discretization(
        m in method(), n in 2usize..10, dt in 1e-3f64..1e-1, v in prop::collection::vec(0.1f64..1.0, 10)
    ) {
        let sys = build(m, n, false);
        let q = reflection(&v[..n]);
        for disc in DiscMethod::ALL {
            let plain = discretize(&sys, dt, disc).unwrap();
            let rotated = discretize(&unitary_conjugate(sys.clone(), &q).unwrap(), dt, disc).unwrap();
            let want = q.matmul(plain.a_bar()).unwrap().matmul(&q.transpose()).unwrap();
            prop_assert!(rotated.a_bar().max_abs_diff(&want).unwrap() <= 1e-11 * (1.0 + want.max_abs()));
        }
    }

    #[test]
    fn legt_delay_is_a_pade_approximant(n in 1usize..=8, re in 0.1f64..5.0, im in -5.0f64..5.0) {
        let s = ComplexValue::new(re, im);
        let h = transfer_function(&delay_readout(StateSystem::build(Method::LegT, n, false).unwrap()).unwrap(), s).unwrap();
        let r = pade_exp_continuants(n).unwrap()[n - 1].eval(s);
        prop_assert!((h - r).norm() <= 1e-6 * r.norm());
    }

    #[test]
    fn legs_kernel_is_basis_times_measure(n in 1usize..16, t in 0.0f64..6.0) {
        let sys = StateSystem::build(Method::LegS, n, false).unwrap();
        let spec = BasisSpec::new(Method::LegS, n, false).unwrap();
        let k = kernel_at(&sys, t);
        let w = measure_eval(&spec, t).unwrap();
        for (i, ki) in k.iter().enumerate() {
            prop_assert!((ki - basis_eval(&spec, i, t).unwrap() * w).abs() <= 1e-8);
        }
    }

    #[test]
    fn gram_is_identity(m in method(), n in 1usize..16, norm: bool) {
        let spec = BasisSpec::new(m, n, norm && m != Method::LegS).unwrap();
        let g = gram_matrix(&spec, spec.default_quad_order()).unwrap();
        prop_assert!(g.max_deviation() <= 1e-10, "{}", g.max_deviation());
    }
}

#[test]
fn halved_systems_run_at_half_speed() {
    for m in [Method::LegT, Method::FouT] {
        let raw = StateSystem::build(m, 9, false).unwrap();
        let half = StateSystem::build(m, 9, true).unwrap();
        for t in [0.0, 0.3, 1.7] {
            for (h, r) in kernel_at(&half, 2.0 * t).iter().zip(kernel_at(&raw, t)) {
                assert!((h - 0.5 * r).abs() <= 1e-10 * (1.0 + r.abs()));
            }
        }
    }
}
