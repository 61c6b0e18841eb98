use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, Result};
use crate::numerics::{rng_gaussian, Rng};

/// Default band edge for delay inputs, as a fraction of the Nyquist frequency.
pub const DEFAULT_CUTOFF: f64 = 0.05;

pub fn white_noise(seed: u64, len: usize) -> Result<Vec<f64>> {
    rng_gaussian(&mut Rng::new(seed), len)
}

/// Gaussian noise with every FFT bin above `cutoff · Nyquist` removed,
/// rescaled to zero mean and unit variance.
pub fn bandlimited_noise(seed: u64, len: usize, cutoff: f64) -> Result<Vec<f64>> {
    if !(cutoff > 0.0 && cutoff <= 1.0) {
        return Err(invalid(format!("cutoff must lie in (0, 1], got {cutoff}")));
    }
    let raw = white_noise(seed, len)?;
    let mut buf: Vec<Complex64> = raw.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(len).process(&mut buf);
    let keep = cutoff * len as f64 / 2.0;
    for (k, z) in buf.iter_mut().enumerate() {
        let freq = k.min(len - k) as f64;
        if k == 0 || freq > keep {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    let mut out: Vec<f64> = buf.iter().map(|z| z.re).collect();
    let mean = out.iter().sum::<f64>() / len as f64;
    let var = out.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / len as f64;
    if var == 0.0 {
        return Err(invalid("cutoff removes every frequency for this length"));
    }
    let sd = var.sqrt();
    out.iter_mut().for_each(|x| *x = (*x - mean) / sd);
    Ok(out)
}
