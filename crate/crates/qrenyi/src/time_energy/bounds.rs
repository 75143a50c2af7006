//! Energy-time uncertainty checks: asymmetry against the almost-periodic time entropy, and
//! time-estimation bounds obtained from the phase machinery through `phi = omega t`.

use super::density::{almost_periodic_density, ap_entropy, periodic_time_entropy, MeanOptions};
use super::spectrum::EnergySpectrum;
use crate::entropy::{renyi_entropy, DiscreteDistribution, RenyiOrder};
use crate::error::{invalid, Error, Result};
use crate::metrology::{f_max, interval_error_distribution, heisenberg_constant, min_phase_deviation, EstimationScenario, Estimator, PhasePovm, Prior};
use crate::phase::TrigDensity;
use crate::quantum::{asymmetry, asymmetry_alpha1, SearchOptions};
use crate::spectral::{partial_trace, DensityOperator, Generator, GeneratorKind};
use serde::Serialize;
use std::f64::consts::TAU;

fn energy_generator(spectrum: &EnergySpectrum) -> Generator<f64> {
    Generator::energy(spectrum.levels(), spectrum.degeneracy())
}

fn energy_distribution(rho: &DensityOperator<f64>, spectrum: &EnergySpectrum) -> Result<DiscreteDistribution<f64>> {
    let d = spectrum.degeneracy();
    let pops = rho.populations();
    let weights = (0..spectrum.levels().len()).map(|k| pops[k * d..(k + 1) * d].iter().sum()).collect();
    DiscreteDistribution::normalized((0..spectrum.levels().len() as i64).collect(), weights)
}

#[derive(Clone, Debug, Serialize)]
pub struct Corollary9Record {
    pub alpha: String,
    pub beta: String,
    /// `A_alpha^E(rho)`.
    pub asymmetry: f64,
    /// `H_alpha^ap`.
    pub ap_entropy: f64,
    /// `A_alpha^E + H_alpha^ap`.
    pub slack: f64,
    /// `H(rho_E) + H_1^ap - H(rho)`.
    pub shannon_slack: f64,
    /// `H_alpha(E) + H_beta^ap`.
    pub energy_entropy_slack: f64,
    /// Tail spread of the Besicovitch mean behind `ap_entropy`.
    pub spread: f64,
}

/// `A_alpha^E + H_alpha^ap >= 0`, `H(rho_E) + H^ap >= H(rho)` and `H_alpha(E) + H_beta^ap >= 0`.
pub fn corollary9_check(
    rho: &DensityOperator<f64>,
    spectrum: &EnergySpectrum,
    order: RenyiOrder<f64>,
    search: &SearchOptions,
    mean: &MeanOptions,
) -> Result<Corollary9Record> {
    let beta = order.conjugate()?;
    let density = almost_periodic_density(rho, spectrum)?;
    let g = energy_generator(spectrum);
    let a = asymmetry(rho, &g, order, search)?.value;
    let h = ap_entropy(&density, order, mean)?;
    let h1 = ap_entropy(&density, RenyiOrder::Shannon, mean)?.value;
    let hb = ap_entropy(&density, beta, mean)?.value;
    let p = energy_distribution(rho, spectrum)?;
    Ok(Corollary9Record {
        alpha: order.to_string(),
        beta: beta.to_string(),
        asymmetry: a,
        ap_entropy: h.value,
        slack: a + h.value,
        shannon_slack: asymmetry_alpha1(rho, &g)? + h1,
        energy_entropy_slack: renyi_entropy(&p, order) + hb,
        spread: h.mean.spread,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TimeEstimationRecord {
    pub alpha: String,
    pub period: f64,
    pub omega: f64,
    pub prior_length: f64,
    /// `<E - epsilon>`.
    pub mean_excitation: f64,
    pub asymmetry: f64,
    /// `H_alpha` of the time error of the canonical time estimator.
    pub error_entropy: f64,
    /// `H_alpha(err) + A_alpha^E - log l`.
    pub tradeoff_slack: f64,
    pub rmse: f64,
    /// `(l / tau) f_max / (<E - epsilon> + omega/2)`.
    pub rmse_bound: f64,
    pub rmse_slack: f64,
    /// `H_alpha` of the periodic time density on `[0, tau)`.
    pub time_entropy: f64,
    /// `A_alpha^E + H_alpha(T_tau) - log tau`.
    pub period_entropy_slack: f64,
    /// Minimal time deviation over reference times.
    pub deviation: f64,
    /// `e^{A_alpha} Delta T - (tau / 2pi) alpha^{alpha/(alpha-1)} f(alpha)`.
    pub deviation_slack: f64,
}

/// Time-estimation bounds for a periodic spectrum with the canonical time estimator and a
/// uniform prior of length `l <= tau`. Levels map to phase labels `n_k` by
/// `E_k = epsilon + omega n_k`; times, deviations and entropies are converted back from phase
/// units. Almost-periodic spectra are refused: `t^2` is not almost periodic, so neither the RMSE
/// nor a time deviation is defined for them.
pub fn time_estimation_bounds(
    rho: &DensityOperator<f64>,
    spectrum: &EnergySpectrum,
    prior_length: f64,
    order: RenyiOrder<f64>,
    search: &SearchOptions,
) -> Result<TimeEstimationRecord> {
    let tau = spectrum.period().ok_or_else(|| {
        Error::NotPeriodic(
            "time RMSE and deviation bounds need a periodic spectrum; for almost-periodic ones the squared time error is not almost periodic"
                .into(),
        )
    })?;
    if rho.dim() != spectrum.dim() {
        return Err(Error::DimensionMismatch { expected: spectrum.dim(), found: rho.dim() });
    }
    if !(prior_length > 0.0 && prior_length <= tau * (1.0 + 1e-12)) {
        return Err(invalid("prior length must lie in (0, tau]"));
    }
    let (omega, labels) = spectrum.harmonic_form().unwrap_or((TAU / tau, vec![0; spectrum.levels().len()]));
    let reduced = if spectrum.degeneracy() == 1 {
        rho.clone()
    } else {
        partial_trace(rho, &[0], &[spectrum.levels().len(), spectrum.degeneracy()])?
    }
    .with_labels(labels.clone())?;
    let values: Vec<f64> = labels.iter().map(|&n| n as f64).collect();
    let g = Generator::from_diagonal(&values, GeneratorKind::Custom);
    let span = labels.iter().max().unwrap_or(&0) - labels.iter().min().unwrap_or(&0);
    let povm = PhasePovm::from_labels(labels.clone(), (2 * span + 2) as usize, None)?;
    let phase_length = (omega * prior_length).min(TAU);
    let scenario = EstimationScenario::new(
        reduced.clone(),
        g,
        Prior::UniformInterval { length: phase_length, center: 0.0 },
        Estimator::Canonical(povm),
    )?;
    let stats = interval_error_distribution(&scenario, &[])?;
    let error_entropy = stats.entropy(order) - omega.ln();
    let a = asymmetry(rho, &energy_generator(spectrum), order, search)?.value;
    let pops = energy_distribution(rho, spectrum)?;
    let mean_excitation: f64 = pops.probs().iter().zip(&labels).map(|(p, &n)| p * n as f64 * omega).sum();
    let rmse = stats.rmse / omega;
    let rmse_bound = prior_length / tau * f_max() / (mean_excitation + 0.5 * omega);
    let density = almost_periodic_density(rho, spectrum)?;
    let time_entropy = periodic_time_entropy(&density, order, scenario.grid_size)?;
    let phase_density = TrigDensity::from_state(reduced.matrix().matrix(), &labels, None)?;
    let deviation = min_phase_deviation(&phase_density).1 / omega;
    Ok(TimeEstimationRecord {
        alpha: order.to_string(),
        period: tau,
        omega,
        prior_length,
        mean_excitation,
        asymmetry: a,
        error_entropy,
        tradeoff_slack: error_entropy + a - prior_length.ln(),
        rmse,
        rmse_bound,
        rmse_slack: rmse - rmse_bound,
        time_entropy,
        period_entropy_slack: a + time_entropy - tau.ln(),
        deviation,
        deviation_slack: a.exp() * deviation - tau / TAU * heisenberg_constant(order)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn eigenstate_saturates_corollary() {
        let s = EnergySpectrum::new(vec![0.0, 1.0, 2f64.sqrt()], 1).unwrap();
        let rho = DensityOperator::<f64>::basis_state(2, vec![0, 1, 2]);
        let r = corollary9_check(&rho, &s, RenyiOrder::Finite(2.0), &SearchOptions::default(), &MeanOptions::default()).unwrap();
        assert!(r.slack.abs() < 1e-9 && r.asymmetry.abs() < 1e-9);
    }

    #[test]
    fn qubit_superposition_slack() {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let rho = DensityOperator::pure_indexed(&[cplx(a, 0.0), cplx(a, 0.0)]).unwrap();
        let s = EnergySpectrum::new(vec![0.0, 1.3], 1).unwrap();
        let r = corollary9_check(&rho, &s, RenyiOrder::Finite(2.0), &SearchOptions::default(), &MeanOptions::default()).unwrap();
        assert!((r.asymmetry - 2f64.ln()).abs() < 1e-12);
        assert!((r.slack - (4.0f64 / 3.0).ln()).abs() < 1e-9);
    }

    #[test]
    fn ground_state_time_error_is_uniform() {
        let s = EnergySpectrum::new(vec![0.5, 1.5, 2.5], 1).unwrap();
        let rho = DensityOperator::<f64>::basis_state(0, vec![0, 1, 2]);
        let r = time_estimation_bounds(&rho, &s, TAU, RenyiOrder::Shannon, &SearchOptions::default()).unwrap();
        assert!((r.error_entropy - TAU.ln()).abs() < 1e-9);
        assert!((r.rmse - std::f64::consts::PI / 3f64.sqrt()).abs() < 1e-9);
        assert!(r.tradeoff_slack.abs() < 1e-9);
    }

    #[test]
    fn almost_periodic_spectrum_is_refused() {
        let s = EnergySpectrum::new(vec![0.0, 1.0, 2f64.sqrt()], 1).unwrap();
        let rho = DensityOperator::<f64>::basis_state(0, vec![0, 1, 2]);
        let e = time_estimation_bounds(&rho, &s, 1.0, RenyiOrder::Shannon, &SearchOptions::default());
        assert!(matches!(e, Err(Error::NotPeriodic(_))));
    }
}
