//! Numerical search for the minimum of `(<N> + 1/2) min_chi Delta_chi Phi` over probe families.
//! The search only reports what it finds; the conjectured value `pi/(2 3^{1/2})` is never
//! asserted.

use super::bounds::min_phase_deviation;
use super::scaling::f_max;
use crate::error::{invalid, Result};
use crate::phase::{golden_max, TrigDensity};
use crate::linalg::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// First zero of the Airy function `Ai`.
pub const AIRY_ZERO: f64 = -2.338_107_410_459_767;

/// `2 (-z_A / 3)^{3/2}`, the large-photon-number limit of the minimum.
pub fn asymptotic_ceiling() -> f64 {
    2.0 * (-AIRY_ZERO / 3.0).powf(1.5)
}

/// `pi / (2 3^{1/2})`, attained by the vacuum.
pub fn vacuum_value() -> f64 {
    PI / (2.0 * 3f64.sqrt())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub enum ProbeFamily {
    /// `cos t |0> + sin t |n>` for `1 <= n <= max_n`.
    TwoTerm { max_n: usize },
    /// Real amplitudes on `|0>, ..., |dim-1>`.
    RealAmplitudes { dim: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub family: ProbeFamily,
    pub minimum: f64,
    pub amplitudes: Vec<f64>,
    pub evaluations: usize,
    pub vacuum_value: f64,
    /// The guaranteed floor `f_max`.
    pub floor: f64,
    pub asymptotic_ceiling: f64,
    pub below_vacuum: bool,
}

/// `(<N> + 1/2) min_chi Delta_chi Phi` for real amplitudes on `|0>, |1>, ...`.
pub fn mean_deviation_product(amplitudes: &[f64]) -> f64 {
    let norm: f64 = amplitudes.iter().map(|a| a * a).sum();
    let v: Vec<_> = amplitudes.iter().map(|&a| num_complex::Complex::new(a, 0.0)).collect();
    let rho = Matrix::outer(&v).scale(1.0 / norm);
    let labels: Vec<i64> = (0..amplitudes.len() as i64).collect();
    let density = TrigDensity::from_state(&rho, &labels, None).expect("labels match");
    let mean: f64 = amplitudes.iter().enumerate().map(|(n, a)| n as f64 * a * a).sum::<f64>() / norm;
    (mean + 0.5) * min_phase_deviation(&density).1
}

/// Minimizes the product over the family with at most `budget` evaluations.
pub fn conjecture_search(family: ProbeFamily, budget: usize, seed: u64) -> Result<ConjectureReport> {
    if budget == 0 {
        return Err(invalid("search budget must be positive"));
    }
    let mut evaluations = 0;
    let (minimum, amplitudes) = match family {
        ProbeFamily::TwoTerm { max_n } => {
            if max_n == 0 {
                return Err(invalid("two-term family needs max_n >= 1"));
            }
            let per = (budget / max_n).max(8);
            let mut best = (f64::INFINITY, vec![1.0]);
            for n in 1..=max_n {
                let amps = |t: f64| {
                    let mut a = vec![0.0; n + 1];
                    a[0] = t.cos();
                    a[n] = t.sin();
                    a
                };
                let (t, neg) = golden_max(|t| -mean_deviation_product(&amps(t)), 0.0, FRAC_PI_2, per);
                evaluations += per + 3;
                if -neg < best.0 {
                    best = (-neg, amps(t));
                }
            }
            best
        }
        ProbeFamily::RealAmplitudes { dim } => {
            if dim == 0 {
                return Err(invalid("probe dimension must be positive"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut x = vec![0.0; dim];
            x[0] = 1.0;
            let mut best = mean_deviation_product(&x);
            evaluations += 1;
            let mut step = 0.5;
            while evaluations < budget && step > 1e-9 {
                let mut improved = false;
                for _ in 0..dim.max(4) {
                    if evaluations >= budget {
                        break;
                    }
                    let y: Vec<f64> = x.iter().map(|&v| v + step * (rng.gen::<f64>() * 2.0 - 1.0)).collect();
                    if y.iter().all(|v| v.abs() < 1e-300) {
                        continue;
                    }
                    let v = mean_deviation_product(&y);
                    evaluations += 1;
                    if v < best {
                        best = v;
                        x = y;
                        improved = true;
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            (best, x.into_iter().map(|a| a / norm).collect())
        }
    };
    Ok(ConjectureReport {
        family,
        minimum,
        amplitudes,
        evaluations,
        vacuum_value: vacuum_value(),
        floor: f_max(),
        asymptotic_ceiling: asymptotic_ceiling(),
        below_vacuum: minimum < vacuum_value() - 1e-9,
    })
}
