//! Error densities of phase estimates under uniform priors.
//!
//! With a uniform prior on the circle the error density is `tr[rho M~_e]`, where
//! `M~_e = e^{-ieG} M~_0 e^{ieG}` and `M~_0 = (1/2pi) sum_i e^{i phi_i G} M_i e^{-i phi_i G}`, a
//! trigonometric polynomial evaluated exactly. With a uniform prior on an interval `I` of length
//! `l` the density is `(1/l) sum_i 1_I(phi_i - e) tr[rho_{phi_i - e} M_i]`, piecewise
//! trigonometric, and is integrated exactly over the cells of a grid on `[-pi, pi)`.

use super::povm::{integer_labels, Estimator, EstimatorEffect, COMPLETENESS_TOL};
use crate::entropy::{renyi_entropy, CircularDensity, RenyiOrder};
use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::phase::TrigDensity;
use crate::scalar::{expi, Complex};
use crate::spectral::{DensityOperator, Generator};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

/// Default density grid.
pub const DEFAULT_GRID: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Prior {
    UniformCircle,
    UniformInterval { length: f64, center: f64 },
}

impl Prior {
    pub fn length(&self) -> f64 {
        match self {
            Self::UniformCircle => TAU,
            Self::UniformInterval { length, .. } => *length,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EstimationScenario {
    pub probe: DensityOperator<f64>,
    pub generator: Generator<f64>,
    pub prior: Prior,
    pub estimator: Estimator,
    pub grid_size: usize,
}

impl EstimationScenario {
    pub fn new(probe: DensityOperator<f64>, generator: Generator<f64>, prior: Prior, estimator: Estimator) -> Result<Self> {
        if probe.dim() != generator.dim() {
            return Err(Error::DimensionMismatch { expected: generator.dim(), found: probe.dim() });
        }
        if estimator.dim() != probe.dim() {
            return Err(Error::DimensionMismatch { expected: probe.dim(), found: estimator.dim() });
        }
        if let Prior::UniformInterval { length, .. } = prior {
            if !(length > 0.0 && length <= TAU + 1e-12) {
                return Err(invalid("prior interval length must lie in (0, 2pi]"));
            }
        }
        integer_labels(&generator)?;
        let defect = estimator.completeness_defect();
        if defect > COMPLETENESS_TOL {
            return Err(Error::IncompletePovm { defect });
        }
        Ok(Self { probe, generator, prior, estimator, grid_size: DEFAULT_GRID })
    }

    pub fn with_grid(mut self, grid_size: usize) -> Self {
        self.grid_size = grid_size;
        self
    }

    /// Same scenario with the probe replaced.
    pub fn with_probe(&self, probe: DensityOperator<f64>) -> Result<Self> {
        Ok(Self::new(probe, self.generator.clone(), self.prior, self.estimator.clone())?.with_grid(self.grid_size))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorStatistics {
    /// Error density on `[-pi, pi)`.
    pub error_density: CircularDensity<f64>,
    pub rmse: f64,
    pub renyi_entropies: BTreeMap<String, f64>,
    /// Exact trigonometric form, available for circular priors.
    pub exact: Option<TrigDensity<f64>>,
    /// `max |sum_i M_i - 1|`.
    pub completeness_defect: f64,
    /// `max_n |2pi <n|M~_0|n> - 1|` for circular priors.
    pub diagonal_defect: f64,
    /// Riemann mass of the sampled density before renormalization.
    pub sampled_mass: f64,
}

impl ErrorStatistics {
    pub fn entropy(&self, order: RenyiOrder<f64>) -> f64 {
        renyi_entropy(&self.error_density, order)
    }
}

/// `2pi M~_0`, whose diagonal is 1 for a complete POVM.
pub fn averaged_effect(labels: &[i64], estimator: &Estimator) -> Matrix<f64> {
    let d = labels.len();
    match estimator {
        Estimator::Canonical(p) => Matrix::from_fn(d, d, |a, b| expi(p.reference_phases[a] - p.reference_phases[b])),
        Estimator::Effects(effects) => {
            let mut m = Matrix::zeros(d, d);
            for EstimatorEffect { angle, effect } in effects {
                for a in 0..d {
                    for b in 0..d {
                        m[(a, b)] += effect[(a, b)] * expi(angle * (labels[a] - labels[b]) as f64);
                    }
                }
            }
            m
        }
    }
}

fn entropies(density: &CircularDensity<f64>, orders: &[RenyiOrder<f64>]) -> BTreeMap<String, f64> {
    orders.iter().map(|&o| (o.to_string(), renyi_entropy(density, o))).collect()
}

/// Error statistics under a uniform prior on the circle.
pub fn error_distribution(scenario: &EstimationScenario, orders: &[RenyiOrder<f64>]) -> Result<ErrorStatistics> {
    if scenario.prior != Prior::UniformCircle {
        return Err(invalid("error_distribution needs a uniform circular prior"));
    }
    let labels = integer_labels(&scenario.generator)?;
    let completeness_defect = scenario.estimator.completeness_defect();
    if completeness_defect > COMPLETENESS_TOL {
        return Err(Error::IncompletePovm { defect: completeness_defect });
    }
    let m = averaged_effect(&labels, &scenario.estimator);
    let diagonal_defect = (0..labels.len()).map(|a| (m[(a, a)] - Complex::new(1.0, 0.0)).norm()).fold(0.0, f64::max);
    if diagonal_defect > COMPLETENESS_TOL {
        return Err(Error::IncompletePovm { defect: diagonal_defect });
    }
    let rho = scenario.probe.matrix().matrix();
    let d = labels.len();
    let mut terms = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let k = labels[b] - labels[a];
            if k >= 0 {
                terms.push((k, rho[(b, a)] * m[(a, b)]));
            }
        }
    }
    let exact = TrigDensity::from_coefficients(terms)?;
    let error_density = exact.sample(scenario.grid_size, -PI)?;
    let rmse = exact.second_moment_about(0.0).max(0.0).sqrt();
    Ok(ErrorStatistics {
        renyi_entropies: entropies(&error_density, orders),
        error_density,
        rmse,
        sampled_mass: exact.mass(),
        exact: Some(exact),
        completeness_defect,
        diagonal_defect,
    })
}

/// Error statistics under a uniform prior on an interval. The canonical estimator is the
/// continuous covariant measurement, whose error density is the canonical phase density for any
/// prior. Other estimators are integrated exactly over each grid cell, giving a cell-averaged
/// density, and the RMSE is integrated exactly.
pub fn interval_error_distribution(scenario: &EstimationScenario, orders: &[RenyiOrder<f64>]) -> Result<ErrorStatistics> {
    let (length, center) = match scenario.prior {
        Prior::UniformCircle => (TAU, 0.0),
        Prior::UniformInterval { length, center } => (length, center),
    };
    if let Estimator::Canonical(_) = scenario.estimator {
        let mut circ = scenario.clone();
        circ.prior = Prior::UniformCircle;
        return error_distribution(&circ, orders);
    }
    let labels = integer_labels(&scenario.generator)?;
    let completeness_defect = scenario.estimator.completeness_defect();
    if completeness_defect > COMPLETENESS_TOL {
        return Err(Error::IncompletePovm { defect: completeness_defect });
    }
    let rho = scenario.probe.matrix().matrix();
    let d = labels.len();
    let kmin = labels.iter().min().copied().unwrap_or(0);
    let kmax = labels.iter().max().copied().unwrap_or(0);
    let span = kmax - kmin;
    let width = (2 * span + 1) as usize;
    let freq = |slot: usize| slot as i64 - span;

    // tr[rho_theta M_i] = sum_k F_ik e^{-ik theta}; with G_ik = F_ik e^{-ik phi_i} outcome i
    // contributes sum_k G_ik e^{ike} at error e, for e on an arc of length l.
    let effects = scenario.estimator.effects();
    let n = scenario.grid_size;
    let h = TAU / n as f64;
    // D[j][k] = int over cell j of e^{ike}.
    let edges: Vec<f64> = (0..=n).map(|j| -PI + j as f64 * h).collect();
    let mut cell_int = vec![Complex::new(0.0, 0.0); n * width];
    for j in 0..n {
        for slot in 0..width {
            cell_int[j * width + slot] = int_exp(freq(slot), edges[j], edges[j + 1]);
        }
    }
    let lo = center - 0.5 * length;
    let mut mass = vec![0.0; n];
    let mut second = 0.0;
    let mut gi = vec![Complex::new(0.0, 0.0); width];
    for EstimatorEffect { angle, effect } in &effects {
        gi.iter_mut().for_each(|z| *z = Complex::new(0.0, 0.0));
        for a in 0..d {
            for b in 0..d {
                let k = labels[a] - labels[b];
                gi[(k + span) as usize] += rho[(a, b)] * effect[(b, a)] * expi(-(k as f64) * angle);
            }
        }
        let value = |x: f64, y: f64| -> f64 { (0..width).map(|s| (gi[s] * int_exp(freq(s), x, y)).re).sum() };
        for (u, v) in arc_pieces(angle - lo - length, length) {
            second += (0..width).map(|s| (gi[s] * int_sq_exp(freq(s), u, v)).re).sum::<f64>();
            let j0 = (((u + PI) / h).floor().max(0.0) as usize).min(n - 1);
            let j1 = (((v + PI) / h).ceil().max(1.0) as usize).min(n);
            for j in j0..j1 {
                let (x, y) = (edges[j].max(u), edges[j + 1].min(v));
                if y <= x {
                    continue;
                }
                mass[j] += if x == edges[j] && y == edges[j + 1] {
                    (0..width).map(|s| (gi[s] * cell_int[j * width + s]).re).sum::<f64>()
                } else {
                    value(x, y)
                };
            }
        }
    }
    let total: f64 = mass.iter().sum::<f64>() / length;
    let values: Vec<f64> = mass.iter().map(|m| m / (length * h * total)).collect();
    let error_density = CircularDensity::unchecked(TAU, -PI + 0.5 * h, values)?;
    let rmse = (second / (length * total)).max(0.0).sqrt();
    Ok(ErrorStatistics {
        renyi_entropies: entropies(&error_density, orders),
        error_density,
        rmse,
        exact: None,
        completeness_defect,
        diagonal_defect: 0.0,
        sampled_mass: total,
    })
}

/// The arc `[start, start + len)` of the circle as at most two intervals of `[-pi, pi)`.
fn arc_pieces(start: f64, len: f64) -> Vec<(f64, f64)> {
    if len >= TAU {
        return vec![(-PI, PI)];
    }
    let s = (start + PI).rem_euclid(TAU) - PI;
    if s + len <= PI {
        vec![(s, s + len)]
    } else {
        vec![(s, PI), (-PI, s + len - TAU)]
    }
}

/// `int_a^b e^{ikx} dx`.
fn int_exp(k: i64, a: f64, b: f64) -> Complex<f64> {
    if k == 0 {
        return Complex::new(b - a, 0.0);
    }
    let kf = k as f64;
    (expi(kf * b) - expi(kf * a)) / Complex::new(0.0, kf)
}

/// `int_a^b x^2 e^{ikx} dx`.
fn int_sq_exp(k: i64, a: f64, b: f64) -> Complex<f64> {
    if k == 0 {
        return Complex::new((b * b * b - a * a * a) / 3.0, 0.0);
    }
    let kf = k as f64;
    let anti = |x: f64| expi(kf * x) * Complex::new(2.0 * x / (kf * kf), 2.0 / (kf * kf * kf) - x * x / kf);
    anti(b) - anti(a)
}

/// The dephasing-type channel `mu(rho) = sum_m A_m rho A_m^dagger`, `A_m = sum_n <m~|n> |n><n|`,
/// built from a rank-one decomposition `2pi M~_0 = sum_m |m~><m~|`. Its canonical phase density
/// is the error density of the estimator, and it preserves the number distribution.
pub fn dephasing_map(scenario: &EstimationScenario) -> Result<DensityOperator<f64>> {
    let labels = integer_labels(&scenario.generator)?;
    let m = averaged_effect(&labels, &scenario.estimator);
    let eig = crate::linalg::eigh(&m);
    let d = labels.len();
    let rho = scenario.probe.matrix().matrix();
    let mut out = Matrix::zeros(d, d);
    for (j, &lam) in eig.values.iter().enumerate() {
        if lam <= 0.0 {
            continue;
        }
        // <m~|n> = sqrt(lam) conj(v_n).
        let amp: Vec<Complex<f64>> = (0..d).map(|n| eig.vectors[(n, j)].conj() * lam.sqrt()).collect();
        for a in 0..d {
            for b in 0..d {
                out[(a, b)] += amp[a] * rho[(a, b)] * amp[b].conj();
            }
        }
    }
    Ok(DensityOperator::from_raw(&out, scenario.probe.labels().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrology::PhasePovm;
    use crate::scalar::cplx;

    fn uniform_superposition(nmax: usize) -> DensityOperator<f64> {
        let a = vec![cplx(1.0, 0.0); nmax + 1];
        DensityOperator::pure_indexed(&a).unwrap()
    }

    #[test]
    fn canonical_estimator_reproduces_phase_density() {
        let g = Generator::number(4);
        let povm = PhasePovm::new(&g, 64, None).unwrap();
        let probe = uniform_superposition(3);
        let s = EstimationScenario::new(probe.clone(), g.clone(), Prior::UniformCircle, Estimator::Canonical(povm.clone())).unwrap();
        let stats = error_distribution(&s, &[]).unwrap();
        let p = povm.density(&probe).unwrap();
        for x in [-3.0, -1.0, 0.2, 2.5] {
            assert!((stats.exact.as_ref().unwrap().eval(x) - p.eval(x)).abs() < 1e-14);
        }
        // Grid effects agree with the continuous form.
        let grid = EstimationScenario::new(probe, g, Prior::UniformCircle, Estimator::Effects(povm.effects())).unwrap();
        let stats2 = error_distribution(&grid, &[]).unwrap();
        assert!((stats2.rmse - stats.rmse).abs() < 1e-12);
    }

    #[test]
    fn constant_estimator_on_interval() {
        let g = Generator::number(3);
        let probe = DensityOperator::<f64>::basis_state(1, vec![0, 1, 2]);
        let l = 1.5;
        let s = EstimationScenario::new(probe, g, Prior::UniformInterval { length: l, center: 0.4 }, Estimator::constant(0.4, 3))
            .unwrap()
            .with_grid(1 << 12);
        let stats = interval_error_distribution(&s, &[RenyiOrder::Shannon]).unwrap();
        assert!((stats.rmse - l / 12f64.sqrt()).abs() < 1e-6);
        assert!((stats.renyi_entropies["1"] - l.ln()).abs() < 1e-3);
    }

    #[test]
    fn dephasing_map_preserves_number_distribution() {
        let g = Generator::number(3);
        let probe = uniform_superposition(2);
        let povm = PhasePovm::new(&g, 8, None).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let est = Estimator::random_rotation(&povm, &mut rng);
        let s = EstimationScenario::new(probe.clone(), g, Prior::UniformCircle, est).unwrap();
        let mu = dephasing_map(&s).unwrap();
        for (x, y) in mu.populations().iter().zip(probe.populations()) {
            assert!((x - y).abs() < 1e-12);
        }
        let p = TrigDensity::from_state(mu.matrix().matrix(), &[0, 1, 2], None).unwrap();
        let e = error_distribution(&s, &[]).unwrap().exact.unwrap();
        for x in [-2.0, 0.0, 1.0] {
            assert!((p.eval(x) - e.eval(x)).abs() < 1e-12);
        }
    }
}
