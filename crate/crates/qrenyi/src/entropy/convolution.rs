use super::{relative_entropy_values, DiscreteDistribution, RenyiOrder};
use crate::error::{invalid, Result};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::scalar::Real;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use serde::Serialize;
use std::collections::BTreeSet;

/// Group in which error and parameter values live.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LabelGroup {
    Integers,
    /// Integers mod `m`, labels `0..m`.
    Cyclic(i64),
}

impl LabelGroup {
    fn add(&self, a: i64, b: i64) -> i64 {
        match self {
            Self::Integers => a + b,
            Self::Cyclic(m) => (a + b).rem_euclid(*m),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConvolutionOptions {
    pub starts: usize,
    pub seed: u64,
    pub nelder_mead: NelderMeadOptions,
}

impl Default for ConvolutionOptions {
    fn default() -> Self {
        Self { starts: 8, seed: 0x5eed, nelder_mead: NelderMeadOptions { initial_step: 1.0, ..Default::default() } }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvolutionBound<T> {
    pub value: T,
    pub minimizer: DiscreteDistribution<T>,
    pub start_values: Vec<T>,
    pub evaluations: usize,
    /// False when no start met the stall criterion; `value` is then the best found.
    pub converged: bool,
}

fn softmax<T: Real>(z: &[T]) -> Vec<T> {
    let m = z.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
    let e: Vec<T> = z.iter().map(|&v| (v - m).exp()).collect();
    let s: T = e.iter().copied().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// `inf_q D_alpha(p_err || q * p_-)`, where `(q * p_-)(y) = sum_x p(x) q(y + x)`.
///
/// `q` ranges over distributions on the labels reachable as `y + x` (all of `Z_m` in the
/// cyclic case) and is parameterized by softmax logits. Each of `opts.starts` seeded starts
/// (the first is uniform) runs Nelder-Mead with restarts; the smallest value wins.
pub fn convolution_lower_bound<T: Real>(
    perr: &DiscreteDistribution<T>,
    prior: &DiscreteDistribution<T>,
    order: RenyiOrder<T>,
    group: LabelGroup,
    opts: &ConvolutionOptions,
) -> Result<ConvolutionBound<T>> {
    if let LabelGroup::Cyclic(m) = group {
        if m <= 0 {
            return Err(invalid("cyclic group order must be positive"));
        }
        let inside = |l: &i64| (0..m).contains(l);
        if !perr.labels().iter().all(inside) || !prior.labels().iter().all(inside) {
            return Err(invalid("labels must lie in 0..m for a cyclic group"));
        }
    }
    let support: Vec<i64> = match group {
        LabelGroup::Cyclic(m) => (0..m).collect(),
        LabelGroup::Integers => {
            let set: BTreeSet<i64> =
                perr.labels().iter().flat_map(|&y| prior.labels().iter().map(move |&x| y + x)).collect();
            set.into_iter().collect()
        }
    };
    let index = |l: i64| support.binary_search(&l).ok();
    // taps[y] lists (index into q, prior weight) contributing to r(y).
    let taps: Vec<Vec<(usize, T)>> = perr
        .labels()
        .iter()
        .map(|&y| {
            prior
                .labels()
                .iter()
                .zip(prior.probs())
                .filter_map(|(&x, &p)| index(group.add(y, x)).map(|i| (i, p)))
                .collect()
        })
        .collect();
    let objective = |z: &[T]| -> T {
        let q = softmax(z);
        let r: Vec<T> = taps.iter().map(|t| t.iter().map(|&(i, p)| p * q[i]).sum()).collect();
        relative_entropy_values(T::one(), perr.probs(), &r, order)
    };

    let k = support.len();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let normal = Normal::new(0.0, 2.0).expect("valid normal");
    let mut best: Option<(T, Vec<T>, bool)> = None;
    let mut start_values = Vec::with_capacity(opts.starts);
    let mut evaluations = 0;
    for s in 0..opts.starts.max(1) {
        let z0: Vec<T> = if s == 0 { vec![T::zero(); k] } else { (0..k).map(|_| T::lit(normal.sample(&mut rng))).collect() };
        let m = nelder_mead(objective, &z0, &opts.nelder_mead);
        evaluations += m.evaluations;
        start_values.push(m.value);
        if best.as_ref().is_none_or(|b| m.value < b.0) {
            best = Some((m.value, m.point, m.converged));
        }
    }
    let (value, z, converged) = best.expect("at least one start");
    let minimizer = DiscreteDistribution::new(support, softmax(&z))?;
    Ok(ConvolutionBound { value, minimizer, start_values, evaluations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_prior_on_cyclic_group_gives_log_order() {
        let perr = DiscreteDistribution::<f64>::new(vec![0], vec![1.0]).unwrap();
        let prior = DiscreteDistribution::uniform((0..4).collect());
        for a in [0.5, 1.0, 2.0] {
            let b = convolution_lower_bound(&perr, &prior, RenyiOrder::new(a).unwrap(), LabelGroup::Cyclic(4), &Default::default())
                .unwrap();
            assert!((b.value - 4f64.ln()).abs() < 1e-12, "alpha={a}: {}", b.value);
        }
    }
}
