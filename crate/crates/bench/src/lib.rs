//! Shared fixtures for the benchmarks.

use hippo_core::experiments::white_noise;
use hippo_core::{DiscMethod, DiscreteSystem, Method, Signal, StateSystem};

pub const SIZES: [usize; 3] = [16, 64, 256];

pub fn system(method: Method, n: usize) -> StateSystem {
    StateSystem::build(method, n, false).expect("valid fixture")
}

pub fn delay_system(method: Method, n: usize, dt: f64, disc: DiscMethod) -> DiscreteSystem {
    let sys = hippo_core::hippo::delay_readout(system(method, n)).expect("finite-window method");
    hippo_core::ssm::discretize(&sys, dt, disc).expect("discretizable")
}

pub fn noise(len: usize, dt: f64) -> Signal {
    Signal::new(white_noise(1, len).expect("non-empty"), dt).expect("valid signal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        let d = delay_system(Method::LegT, 8, 0.01, DiscMethod::Zoh);
        assert_eq!(d.state_size(), 8);
        assert_eq!(noise(10, 0.1).len(), 10);
    }
}
