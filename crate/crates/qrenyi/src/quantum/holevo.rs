use super::divergence::{divergence_raw, state_term};
use super::search::{regularize, seeded_rng, BlockFactor, SearchOptions};
use super::StartReport;
use crate::entropy::{DiscreteDistribution, RenyiOrder};
use crate::error::{invalid, Error, Result};
use crate::linalg::{eigh, Eigh, Matrix};
use crate::scalar::{expi, Real};
use crate::spectral::{displace, DensityOperator, Generator};
use serde::Serialize;

/// Smoothing schedule for the max over signals at order infinity.
const SMOOTHING: [f64; 4] = [20.0, 200.0, 2000.0, 20000.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EnsembleProvenance {
    /// `rho_j = displace(probe, x_j)`.
    Displaced,
    /// `rho_j` is the displaced probe averaged over cell `j` of a partition of the range.
    CellAveraged,
    Explicit,
}

/// A discrete ensemble `{p_j, rho_j}` of signal states.
#[derive(Clone, Debug)]
pub struct SignalEnsemble<T: Real> {
    pub displacements: Vec<T>,
    pub prior: DiscreteDistribution<T>,
    pub states: Vec<DensityOperator<T>>,
    pub generator: Generator<T>,
    pub provenance: EnsembleProvenance,
}

impl<T: Real> SignalEnsemble<T> {
    /// Displaced copies of `probe` at `displacements` with the given prior weights.
    pub fn from_probe(probe: &DensityOperator<T>, g: &Generator<T>, displacements: Vec<T>, prior: Vec<T>) -> Result<Self> {
        if displacements.len() != prior.len() {
            return Err(Error::DimensionMismatch { expected: displacements.len(), found: prior.len() });
        }
        let states = displacements.iter().map(|&x| displace(probe, g, x)).collect::<Result<Vec<_>>>()?;
        let prior = DiscreteDistribution::from_probs(prior)?;
        Ok(Self { displacements, prior, states, generator: g.clone(), provenance: EnsembleProvenance::Displaced })
    }

    /// Uniform prior on `[center - r, center + r]` split into `cells` equal cells, each signal
    /// being the cell average of the displaced probe. Requires a diagonal generator.
    pub fn uniform_interval(probe: &DensityOperator<T>, g: &Generator<T>, center: T, r: T, cells: usize) -> Result<Self> {
        if cells == 0 || !(r > T::zero()) {
            return Err(invalid("uniform interval needs r > 0 and at least one cell"));
        }
        if probe.dim() != g.dim() {
            return Err(Error::DimensionMismatch { expected: g.dim(), found: probe.dim() });
        }
        let d = g.diagonal_values().ok_or_else(|| invalid("cell averaging needs a diagonal generator"))?.to_vec();
        let n = T::from_usize(cells).unwrap();
        let width = (r + r) / n;
        let half = T::lit(0.5);
        let m = probe.matrix().matrix();
        let mut displacements = Vec::with_capacity(cells);
        let mut states = Vec::with_capacity(cells);
        for j in 0..cells {
            let x = center - r + (T::from_usize(j).unwrap() + half) * width;
            let out = Matrix::from_fn(probe.dim(), probe.dim(), |a, b| {
                let w = d[a] - d[b];
                m[(a, b)] * expi(-x * w) * sinc(w * width * half)
            });
            displacements.push(x);
            states.push(DensityOperator::from_raw(&out, probe.labels().to_vec()));
        }
        Ok(Self {
            displacements,
            prior: DiscreteDistribution::uniform((0..cells as i64).collect()),
            states,
            generator: g.clone(),
            provenance: EnsembleProvenance::CellAveraged,
        })
    }

    pub fn explicit(states: Vec<DensityOperator<T>>, prior: Vec<T>, g: &Generator<T>) -> Result<Self> {
        if states.len() != prior.len() {
            return Err(Error::DimensionMismatch { expected: states.len(), found: prior.len() });
        }
        if let Some(s) = states.iter().find(|s| s.dim() != g.dim()) {
            return Err(Error::DimensionMismatch { expected: g.dim(), found: s.dim() });
        }
        let prior = DiscreteDistribution::from_probs(prior)?;
        Ok(Self {
            displacements: (0..states.len()).map(|j| T::from_usize(j).unwrap()).collect(),
            prior,
            states,
            generator: g.clone(),
            provenance: EnsembleProvenance::Explicit,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `sum_j p_j rho_j`.
    pub fn average_state(&self) -> DensityOperator<T> {
        let parts: Vec<(T, &DensityOperator<T>)> = self.prior.probs().iter().copied().zip(&self.states).collect();
        DensityOperator::mixture(&parts).expect("ensemble states share a dimension")
    }

    /// Outcome distributions of the POVM `effects` on each signal.
    pub fn measure(&self, effects: &[Matrix<T>]) -> Result<Vec<DiscreteDistribution<T>>> {
        let labels: Vec<i64> = (0..effects.len() as i64).collect();
        self.states
            .iter()
            .map(|s| {
                let p: Vec<T> = effects.iter().map(|e| s.matrix().matrix().trace_product(e).re.max(T::zero())).collect();
                DiscreteDistribution::normalized(labels.clone(), p)
            })
            .collect()
    }
}

fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-4) {
        let x2 = x * x;
        T::one() - x2 / T::lit(6.0) + x2 * x2 / T::lit(120.0)
    } else {
        x.sin() / x
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HolevoResult<T: Real> {
    pub value: T,
    pub order: String,
    /// The output state attaining `value`.
    pub sigma: DensityOperator<T>,
    pub starts: Vec<StartReport>,
    pub converged: bool,
}

/// `D_alpha(rho_{EX} || sigma (x) rho_X)` at a given `sigma`, using the block structure of the
/// classical-quantum state.
pub fn holevo_value_at<T: Real>(ens: &SignalEnsemble<T>, sigma: &DensityOperator<T>, order: RenyiOrder<T>) -> Result<T> {
    if sigma.dim() != ens.generator.dim() {
        return Err(Error::DimensionMismatch { expected: ens.generator.dim(), found: sigma.dim() });
    }
    Ok(value_at(ens, &sigma.matrix().eigh(), order))
}

fn active<T: Real>(ens: &SignalEnsemble<T>) -> Vec<(T, &Matrix<T>)> {
    ens.prior
        .probs()
        .iter()
        .zip(&ens.states)
        .filter(|(p, _)| **p > T::zero())
        .map(|(&p, s)| (p, s.matrix().matrix()))
        .collect()
}

fn value_at<T: Real>(ens: &SignalEnsemble<T>, sigma: &Eigh<T>, order: RenyiOrder<T>) -> T {
    let parts = active(ens);
    match order {
        RenyiOrder::Shannon => parts.iter().map(|(p, r)| *p * divergence_raw(r, sigma, order)).sum(),
        RenyiOrder::Infinite => {
            parts.iter().map(|(_, r)| divergence_raw(r, sigma, order)).fold(T::neg_infinity(), |m, v| m.max(v))
        }
        RenyiOrder::Finite(a) => {
            let k = a - T::one();
            let q: T = parts.iter().map(|(p, r)| *p * (k * divergence_raw(r, sigma, order)).exp()).sum();
            q.ln() / k
        }
    }
}

/// Renyi-Holevo quantity `chi_alpha = inf_sigma D_alpha(rho_{EX} || sigma (x) rho_X)`.
pub fn renyi_holevo<T: Real>(ens: &SignalEnsemble<T>, order: RenyiOrder<T>, opts: &SearchOptions) -> Result<HolevoResult<T>> {
    renyi_holevo_with(ens, order, opts, &[])
}

/// As [`renyi_holevo`], with extra feasible output states that are evaluated exactly and also
/// used as warm starts.
pub fn renyi_holevo_with<T: Real>(
    ens: &SignalEnsemble<T>,
    order: RenyiOrder<T>,
    opts: &SearchOptions,
    candidates: &[DensityOperator<T>],
) -> Result<HolevoResult<T>> {
    if let RenyiOrder::Finite(a) = order {
        if a < T::lit(0.5) {
            return Err(Error::InvalidOrder(a.as_f64()));
        }
    }
    if ens.is_empty() {
        return Err(invalid("empty ensemble"));
    }
    let d = ens.generator.dim();
    if let Some(c) = candidates.iter().find(|c| c.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: c.dim() });
    }
    let avg = ens.average_state();
    let labels = avg.labels().to_vec();
    let mut pool: Vec<(String, Matrix<T>)> = vec![("average".to_string(), avg.matrix().matrix().clone())];
    for (i, c) in candidates.iter().enumerate() {
        pool.push((format!("candidate-{i}"), c.matrix().matrix().clone()));
    }

    // Order 1: the infimum is attained at the average state.
    if order.is_shannon() {
        let value = value_at(ens, &eigh(&pool[0].1), order);
        return Ok(HolevoResult {
            value: value.max(T::zero()),
            order: order.to_string(),
            sigma: avg,
            starts: vec![StartReport {
                provenance: "average-exact".to_string(),
                value: value.as_f64(),
                iterations: 0,
                evaluations: 1,
                converged: true,
            }],
            converged: true,
        });
    }

    let factor = BlockFactor::new(vec![d]);
    let parts = active(ens);
    let mut rng = seeded_rng(opts.seed);
    let mut starts: Vec<(String, Vec<T>)> =
        pool.iter().map(|(name, m)| (name.clone(), factor.params_for(&regularize(m, T::lit(1e-3))))).collect();
    starts.push(("maximally-mixed".to_string(), factor.params_for(&Matrix::identity(d).scale(T::one() / T::from_usize(d).unwrap()))));
    while starts.len() < opts.starts.max(pool.len() + 1) {
        let k = starts.len();
        starts.push((format!("random-{k}"), factor.random_params(&mut rng)));
    }

    let (sigma_found, reports, converged) = match order {
        RenyiOrder::Finite(a) => {
            let k = a - T::one();
            let objective = |eig: &Eigh<T>| -> Option<(T, Matrix<T>)> {
                let mut q = T::zero();
                let mut grad = Matrix::zeros(d, d);
                for (p, r) in &parts {
                    let (v, g) = state_term(r, eig, order)?;
                    q = q + *p * v;
                    grad = &grad + &g.scale(*p);
                }
                if !(q > T::zero()) {
                    return None;
                }
                Some((q.ln() / k, grad.scale(T::one() / (k * q))))
            };
            let out = factor.minimize(&objective, starts, &opts.lbfgs);
            (out.sigma, out.reports, out.converged)
        }
        RenyiOrder::Infinite => {
            // Each start follows the whole smoothing schedule; the end points are compared
            // by their exact value.
            let mut all_reports = Vec::new();
            let mut best: Option<(T, Matrix<T>, bool)> = None;
            for (name, x0) in starts {
                let mut x = x0;
                let mut sigma = factor.sigma(&x);
                let mut converged = true;
                for &kappa in &SMOOTHING {
                    let kappa = T::lit(kappa);
                    let objective = |eig: &Eigh<T>| -> Option<(T, Matrix<T>)> {
                        let terms: Vec<(T, Matrix<T>)> =
                            parts.iter().map(|(_, r)| state_term(r, eig, order)).collect::<Option<Vec<_>>>()?;
                        let logs: Vec<T> = terms.iter().map(|(l, _)| l.ln()).collect();
                        let top = logs.iter().fold(T::neg_infinity(), |m, &v| m.max(v));
                        let weights: Vec<T> = logs.iter().map(|&l| (kappa * (l - top)).exp()).collect();
                        let z: T = weights.iter().copied().sum();
                        let mut grad = Matrix::zeros(d, d);
                        for (w, (lam, g)) in weights.iter().zip(&terms) {
                            grad = &grad + &g.scale(*w / (z * *lam));
                        }
                        Some((top + z.ln() / kappa, grad))
                    };
                    let out = factor.minimize(&objective, vec![(name.clone(), x)], &opts.lbfgs);
                    all_reports.extend(out.reports.into_iter().map(|mut r| {
                        r.provenance = format!("{} (smoothing {})", r.provenance, kappa.as_f64());
                        r
                    }));
                    x = factor.params_for(&out.sigma);
                    sigma = out.sigma;
                    converged = out.converged;
                }
                let v = value_at(ens, &eigh(&sigma), order);
                if best.as_ref().is_none_or(|b| v < b.0) {
                    best = Some((v, sigma, converged));
                }
            }
            let (_, s, c) = best.expect("at least one start");
            (s, all_reports, c)
        }
        RenyiOrder::Shannon => unreachable!(),
    };

    let mut reports = reports;
    let mut best = (value_at(ens, &eigh(&sigma_found), order), sigma_found);
    for (name, m) in pool {
        let v = value_at(ens, &eigh(&m), order);
        reports.push(StartReport { provenance: format!("{name}-exact"), value: v.as_f64(), iterations: 0, evaluations: 1, converged: true });
        if v < best.0 {
            best = (v, m);
        }
    }
    Ok(HolevoResult {
        value: best.0.max(T::zero()),
        order: order.to_string(),
        sigma: DensityOperator::from_raw(&best.1, labels),
        starts: reports,
        converged,
    })
}

/// `chi_alpha` of cell-averaged uniform ensembles over `[-r, r]` for each `r`, a finite-size
/// approach to the uniform-ensemble limit `A_alpha^G(rho)`.
pub fn uniform_ensemble_asymmetry_approximation<T: Real>(
    rho: &DensityOperator<T>,
    g: &Generator<T>,
    order: RenyiOrder<T>,
    r_values: &[T],
    cells: usize,
    opts: &SearchOptions,
) -> Result<Vec<(T, T)>> {
    r_values
        .iter()
        .map(|&r| {
            let ens = SignalEnsemble::uniform_interval(rho, g, T::zero(), r, cells)?;
            Ok((r, renyi_holevo(&ens, order, opts)?.value))
        })
        .collect()
}
