//! Classical Renyi entropies, divergences and the distribution types they act on.
//!
//! All quantities are in nats. For a distribution with cell measure `h` and values `p_i`:
//!
//! | order | `H_alpha` |
//! |---|---|
//! | `0` | `log(h * #{p_i > 1e-15})` |
//! | `1` | `-sum h p log p` |
//! | `inf` | `-log max p` |
//! | otherwise | `log(sum h p^alpha) / (1 - alpha)` |

mod convolution;
mod maxent;

pub use convolution::{convolution_lower_bound, ConvolutionBound, ConvolutionOptions, LabelGroup};
pub use maxent::{maxent_extremal_density, ExtremalDensity, MomentConstraint};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// Orders within this distance of 1 use the Shannon limit.
pub const SHANNON_SNAP: f64 = 1e-9;
/// Orders at or beyond this value use the `alpha = inf` limit.
pub const INFINITY_SNAP: f64 = 1e9;
/// Support cutoff used by the order-0 entropy.
pub const SUPPORT_CUTOFF: f64 = 1e-15;
const NORMALIZATION_TOL: f64 = 1e-10;
const DENSITY_NORMALIZATION_TOL: f64 = 1e-8;

/// Renyi order in `[0, inf]` with exact encodings for `1` and `inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RenyiOrder<T> {
    Shannon,
    Infinite,
    Finite(T),
}

impl<T: Real> RenyiOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha.is_nan() || alpha < T::zero() {
            return Err(Error::InvalidOrder(alpha.as_f64()));
        }
        if alpha.is_infinite() || alpha >= T::lit(INFINITY_SNAP) {
            Ok(Self::Infinite)
        } else if (alpha - T::one()).abs() <= T::lit(SHANNON_SNAP) {
            Ok(Self::Shannon)
        } else {
            Ok(Self::Finite(alpha))
        }
    }

    pub fn half() -> Self {
        Self::Finite(T::lit(0.5))
    }

    /// Accepts a number, `inf` or `infinity`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "inf" || t == "infinity" || t == "∞" {
            return Ok(Self::Infinite);
        }
        let v: f64 = t.parse().map_err(|_| invalid(format!("cannot parse Renyi order '{s}'")))?;
        Self::new(T::lit(v))
    }

    pub fn value(&self) -> T {
        match self {
            Self::Shannon => T::one(),
            Self::Infinite => T::infinity(),
            Self::Finite(a) => *a,
        }
    }

    pub fn is_shannon(&self) -> bool {
        matches!(self, Self::Shannon)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }

    /// `beta = alpha / (2 alpha - 1)`, the order paired with `alpha` by `1/alpha + 1/beta = 2`.
    /// Defined for `alpha >= 1/2`.
    pub fn conjugate(&self) -> Result<Self> {
        match self {
            Self::Shannon => Ok(Self::Shannon),
            Self::Infinite => Ok(Self::half()),
            Self::Finite(a) => {
                let half = T::lit(0.5);
                if *a < half - T::lit(1e-12) {
                    return Err(Error::InvalidOrder(a.as_f64()));
                }
                let denom = *a + *a - T::one();
                if denom <= T::lit(2e-12) {
                    Ok(Self::Infinite)
                } else {
                    Self::new(*a / denom)
                }
            }
        }
    }

    /// `alpha^{alpha/(alpha-1)}`, with limits `e` at 1 and `alpha` at infinity handled by callers.
    pub fn heisenberg_prefactor(&self) -> T {
        match self {
            Self::Shannon => T::E(),
            Self::Infinite => T::infinity(),
            Self::Finite(a) => (*a * a.ln() / (*a - T::one())).exp(),
        }
    }
}

impl<T: Real> fmt::Display for RenyiOrder<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Shannon => write!(f, "1"),
            Self::Infinite => write!(f, "inf"),
            Self::Finite(a) => write!(f, "{a}"),
        }
    }
}

/// Unit in which entropies are reported. Computation is always in nats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LogBase {
    Nats,
    Bits,
}

impl LogBase {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "e" | "nat" | "nats" => Ok(Self::Nats),
            "2" | "bit" | "bits" => Ok(Self::Bits),
            other => Err(invalid(format!("unknown log base '{other}'"))),
        }
    }

    /// Reads `RENYI_LOG_BASE`, defaulting to nats.
    pub fn from_env() -> Result<Self> {
        match std::env::var("RENYI_LOG_BASE") {
            Ok(v) => Self::parse(&v),
            Err(_) => Ok(Self::Nats),
        }
    }

    pub fn convert<T: Real>(self, nats: T) -> T {
        match self {
            Self::Nats => nats,
            Self::Bits => nats / T::LN_2(),
        }
    }
}

/// Identifies the sample grid of a distribution so divergences can refuse mismatched inputs.
#[derive(Clone, Debug, PartialEq)]
pub enum GridKey {
    Discrete(Vec<i64>),
    Circular { period: f64, start: f64, n: usize },
    Line { start: f64, spacing: f64, n: usize },
}

impl GridKey {
    fn matches(&self, other: &GridKey) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
        match (self, other) {
            (Self::Discrete(a), Self::Discrete(b)) => a == b,
            (Self::Circular { period: p, start: s, n }, Self::Circular { period: q, start: t, n: m }) => {
                n == m && close(*p, *q) && close(*s, *t)
            }
            (Self::Line { start: s, spacing: h, n }, Self::Line { start: t, spacing: k, n: m }) => {
                n == m && close(*s, *t) && close(*h, *k)
            }
            _ => false,
        }
    }
}

/// Sampled distribution: values `v_i` on cells of equal measure `h`, so that integrals are
/// Riemann sums `sum h f(v_i)`.
pub trait Distribution<T: Real> {
    fn cell(&self) -> T;
    fn values(&self) -> &[T];
    fn grid_key(&self) -> GridKey;

    fn total_mass(&self) -> T {
        self.cell() * self.values().iter().copied().sum::<T>()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteDistribution<T> {
    labels: Vec<i64>,
    probs: Vec<T>,
}

impl<T: Real> DiscreteDistribution<T> {
    /// Validates nonnegativity and normalization within `1e-10`. Labels must be distinct.
    pub fn new(labels: Vec<i64>, probs: Vec<T>) -> Result<Self> {
        if labels.len() != probs.len() {
            return Err(Error::DimensionMismatch { expected: labels.len(), found: probs.len() });
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("duplicate labels in discrete distribution"));
        }
        let tiny = T::tol(1e-14);
        let mut probs = probs;
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -tiny {
                return Err(Error::NegativeProbability(p.as_f64()));
            }
            *p = p.max(T::zero());
        }
        let mass: T = probs.iter().copied().sum();
        if (mass - T::one()).abs() > T::tol(NORMALIZATION_TOL) {
            return Err(Error::NotNormalized { mass: mass.as_f64() });
        }
        Ok(Self { labels, probs })
    }

    pub fn from_probs(probs: Vec<T>) -> Result<Self> {
        Self::new((0..probs.len() as i64).collect(), probs)
    }

    /// Divides by the total mass first.
    pub fn normalized(labels: Vec<i64>, weights: Vec<T>) -> Result<Self> {
        let s: T = weights.iter().copied().sum();
        if !(s > T::zero()) {
            return Err(Error::NotNormalized { mass: s.as_f64() });
        }
        Self::new(labels, weights.into_iter().map(|w| w / s).collect())
    }

    pub fn uniform(labels: Vec<i64>) -> Self {
        let p = T::one() / T::from_usize(labels.len()).unwrap();
        let n = labels.len();
        Self { labels, probs: vec![p; n] }
    }

    pub fn point_mass(label: i64) -> Self {
        Self { labels: vec![label], probs: vec![T::one()] }
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, label: i64) -> T {
        self.labels.iter().position(|&l| l == label).map_or(T::zero(), |i| self.probs[i])
    }

    pub fn max_prob(&self) -> T {
        self.probs.iter().fold(T::zero(), |m, &p| m.max(p))
    }

    pub fn mean(&self) -> T {
        self.labels.iter().zip(&self.probs).map(|(&l, &p)| T::from_i64(l).unwrap() * p).sum()
    }

    /// Same distribution restated on `labels` (a superset), padding with zeros.
    pub fn on_labels(&self, labels: &[i64]) -> Result<Self> {
        let probs = labels.iter().map(|&l| self.prob(l)).collect();
        Self::new(labels.to_vec(), probs)
    }
}

impl<T: Real> Distribution<T> for DiscreteDistribution<T> {
    fn cell(&self) -> T {
        T::one()
    }
    fn values(&self) -> &[T] {
        &self.probs
    }
    fn grid_key(&self) -> GridKey {
        GridKey::Discrete(self.labels.clone())
    }
}

/// Density on a circle of circumference `period`, sampled at `start + i * period / n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircularDensity<T> {
    period: T,
    start: T,
    values: Vec<T>,
}

impl<T: Real> CircularDensity<T> {
    /// Validates nonnegativity and Riemann-sum normalization within `1e-8`.
    pub fn new(period: T, start: T, values: Vec<T>) -> Result<Self> {
        let d = Self::unchecked(period, start, values)?;
        let mass = d.total_mass();
        if (mass - T::one()).abs() > T::tol(DENSITY_NORMALIZATION_TOL) {
            return Err(Error::NotNormalized { mass: mass.as_f64() });
        }
        Ok(d)
    }

    /// Checks sign and shape but not normalization.
    pub fn unchecked(period: T, start: T, values: Vec<T>) -> Result<Self> {
        if !(period > T::zero()) || values.is_empty() {
            return Err(invalid("circular density needs a positive period and at least one sample"));
        }
        let tiny = T::tol(1e-12);
        let mut values = values;
        for v in values.iter_mut() {
            if !v.is_finite() || *v < -tiny {
                return Err(Error::NegativeProbability(v.as_f64()));
            }
            *v = v.max(T::zero());
        }
        Ok(Self { period, start, values })
    }

    pub fn from_fn(period: T, start: T, n: usize, f: impl Fn(T) -> T) -> Result<Self> {
        let h = period / T::from_usize(n).unwrap();
        let v = (0..n).map(|i| f(start + h * T::from_usize(i).unwrap())).collect();
        Self::new(period, start, v)
    }

    pub fn uniform(period: T, start: T, n: usize) -> Self {
        Self { period, start, values: vec![T::one() / period; n] }
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn spacing(&self) -> T {
        self.period / T::from_usize(self.values.len()).unwrap()
    }

    pub fn point(&self, i: usize) -> T {
        self.start + self.spacing() * T::from_usize(i).unwrap()
    }

    pub fn max_value(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &v| m.max(v))
    }

    /// `sum h (x_i - center)^2 p_i` with `x_i - center` wrapped into `[-period/2, period/2)`.
    pub fn second_moment_about(&self, center: T) -> T {
        let h = self.spacing();
        let half = self.period * T::lit(0.5);
        (0..self.values.len())
            .map(|i| {
                let u = wrap_centered(self.point(i) - center, self.period, half);
                h * u * u * self.values[i]
            })
            .sum()
    }
}

fn wrap_centered<T: Real>(x: T, period: T, half: T) -> T {
    let mut u = (x + half) % period;
    if u < T::zero() {
        u = u + period;
    }
    u - half
}

impl<T: Real> Distribution<T> for CircularDensity<T> {
    fn cell(&self) -> T {
        self.spacing()
    }
    fn values(&self) -> &[T] {
        &self.values
    }
    fn grid_key(&self) -> GridKey {
        GridKey::Circular { period: self.period.as_f64(), start: self.start.as_f64(), n: self.values.len() }
    }
}

/// Density on the real line sampled at `start + i * spacing`, vanishing outside
/// `[start, start + n * spacing)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealLineDensity<T> {
    start: T,
    spacing: T,
    values: Vec<T>,
}

impl<T: Real> RealLineDensity<T> {
    pub fn new(start: T, spacing: T, values: Vec<T>) -> Result<Self> {
        if !(spacing > T::zero()) || values.is_empty() {
            return Err(invalid("real-line density needs a positive spacing and at least one sample"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < -T::tol(1e-12)) {
            return Err(invalid("real-line density has negative or non-finite values"));
        }
        let d = Self { start, spacing, values: values.into_iter().map(|v| v.max(T::zero())).collect() };
        let mass = d.total_mass();
        if (mass - T::one()).abs() > T::tol(1e-6) {
            return Err(Error::NotNormalized { mass: mass.as_f64() });
        }
        Ok(d)
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn point(&self, i: usize) -> T {
        self.start + self.spacing * T::from_usize(i).unwrap()
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn moment(&self, power: i32) -> T {
        (0..self.values.len()).map(|i| self.spacing * self.point(i).powi(power) * self.values[i]).sum()
    }
}

impl<T: Real> Distribution<T> for RealLineDensity<T> {
    fn cell(&self) -> T {
        self.spacing
    }
    fn values(&self) -> &[T] {
        &self.values
    }
    fn grid_key(&self) -> GridKey {
        GridKey::Line { start: self.start.as_f64(), spacing: self.spacing.as_f64(), n: self.values.len() }
    }
}

/// `log sum_i h v_i^alpha`, computed with the maximum factored out.
fn log_power_sum<T: Real>(h: T, values: &[T], alpha: T) -> T {
    let vmax = values.iter().fold(T::zero(), |m, &v| m.max(v));
    if vmax == T::zero() {
        return T::neg_infinity();
    }
    let s: T = values.iter().filter(|&&v| v > T::zero()).map(|&v| (v / vmax).powf(alpha)).sum();
    h.ln() + alpha * vmax.ln() + s.ln()
}

pub fn renyi_entropy<T: Real, D: Distribution<T> + ?Sized>(d: &D, order: RenyiOrder<T>) -> T {
    let h = d.cell();
    let v = d.values();
    match order {
        RenyiOrder::Shannon => -v.iter().filter(|&&p| p > T::zero()).map(|&p| h * p * p.ln()).sum::<T>(),
        RenyiOrder::Infinite => -v.iter().fold(T::zero(), |m, &p| m.max(p)).ln(),
        RenyiOrder::Finite(a) if a == T::zero() => {
            let cut = T::lit(SUPPORT_CUTOFF);
            (h * T::from_usize(v.iter().filter(|&&p| p > cut).count()).unwrap()).ln()
        }
        RenyiOrder::Finite(a) => log_power_sum(h, v, a) / (T::one() - a),
    }
}

/// `L_alpha = exp(H_alpha)`.
pub fn renyi_length<T: Real, D: Distribution<T> + ?Sized>(d: &D, order: RenyiOrder<T>) -> T {
    renyi_entropy(d, order).exp()
}

/// Classical Renyi divergence `D_alpha(p || q)` on a shared grid. Returns `+inf` when `p`
/// has mass where `q` vanishes and the order makes that divergent.
pub fn classical_relative_entropy<T: Real, D: Distribution<T> + ?Sized>(p: &D, q: &D, order: RenyiOrder<T>) -> Result<T> {
    if !p.grid_key().matches(&q.grid_key()) {
        return Err(Error::GridMismatch);
    }
    Ok(relative_entropy_values(p.cell(), p.values(), q.values(), order))
}

/// Divergence of value arrays sharing cell measure `h`.
pub(crate) fn relative_entropy_values<T: Real>(h: T, p: &[T], q: &[T], order: RenyiOrder<T>) -> T {
    let pairs = p.iter().zip(q).filter(|(&a, _)| a > T::zero());
    match order {
        RenyiOrder::Shannon => {
            let mut acc = T::zero();
            for (&a, &b) in pairs {
                if b <= T::zero() {
                    return T::infinity();
                }
                acc = acc + h * a * (a / b).ln();
            }
            acc
        }
        RenyiOrder::Infinite => {
            let mut worst = T::neg_infinity();
            for (&a, &b) in pairs {
                if b <= T::zero() {
                    return T::infinity();
                }
                worst = worst.max((a / b).ln());
            }
            worst
        }
        RenyiOrder::Finite(a0) if a0 == T::zero() => {
            let s: T = pairs.map(|(_, &b)| h * b).sum();
            -s.ln()
        }
        RenyiOrder::Finite(alpha) => {
            let mut logs = Vec::with_capacity(p.len());
            for (&a, &b) in pairs {
                if b <= T::zero() {
                    if alpha > T::one() {
                        return T::infinity();
                    }
                    continue;
                }
                logs.push(alpha * a.ln() + (T::one() - alpha) * b.ln());
            }
            if logs.is_empty() {
                return T::infinity();
            }
            let m = logs.iter().fold(T::neg_infinity(), |m, &x| m.max(x));
            let s: T = logs.iter().map(|&x| (x - m).exp()).sum();
            (h.ln() + m + s.ln()) / (alpha - T::one())
        }
    }
}

/// Sibson's mutual information `I_alpha(A:X) = inf_q D_alpha(p_{AX} || q_A p_X)`, evaluated
/// in closed form. With `r(a) = sum_j p_j p(a|j)^alpha` the infimum is attained at
/// `q ~ r^{1/alpha}`, giving `H_{1/alpha}(r / sum r) + log(sum r) / (alpha - 1)`.
///
/// Every conditional must use the same outcome labels.
pub fn sibson_mutual_information<T: Real>(
    prior: &DiscreteDistribution<T>,
    conditionals: &[DiscreteDistribution<T>],
    order: RenyiOrder<T>,
) -> Result<T> {
    if conditionals.len() != prior.len() {
        return Err(Error::DimensionMismatch { expected: prior.len(), found: conditionals.len() });
    }
    let outcomes = conditionals.first().ok_or_else(|| invalid("empty channel"))?.labels().to_vec();
    if conditionals.iter().any(|c| c.labels() != outcomes.as_slice()) {
        return Err(Error::GridMismatch);
    }
    let m = outcomes.len();
    let active: Vec<(T, &DiscreteDistribution<T>)> =
        prior.probs().iter().copied().zip(conditionals).filter(|(p, _)| *p > T::zero()).collect();
    match order {
        RenyiOrder::Shannon => {
            let marginal: Vec<T> = (0..m).map(|a| active.iter().map(|(p, c)| *p * c.probs()[a]).sum()).collect();
            let mut acc = T::zero();
            for (p, c) in &active {
                for a in 0..m {
                    let v = c.probs()[a];
                    if v > T::zero() {
                        acc = acc + *p * v * (v / marginal[a]).ln();
                    }
                }
            }
            Ok(acc)
        }
        RenyiOrder::Infinite => {
            let s: T = (0..m).map(|a| active.iter().fold(T::zero(), |mx, (_, c)| mx.max(c.probs()[a]))).sum();
            Ok(s.ln())
        }
        RenyiOrder::Finite(alpha) => {
            if !(alpha > T::zero()) {
                return Err(Error::InvalidOrder(alpha.as_f64()));
            }
            let r: Vec<T> = (0..m).map(|a| active.iter().map(|(p, c)| *p * c.probs()[a].powf(alpha)).sum()).collect();
            let total: T = r.iter().copied().sum();
            let tilde = DiscreteDistribution::new(outcomes, r.iter().map(|&x| x / total).collect())?;
            let inv = RenyiOrder::new(T::one() / alpha)?;
            Ok(renyi_entropy(&tilde, inv) + total.ln() / (alpha - T::one()))
        }
    }
}

/// Distribution of the sum of independent integer-valued variables.
pub fn convolve<T: Real>(a: &DiscreteDistribution<T>, b: &DiscreteDistribution<T>) -> DiscreteDistribution<T> {
    let mut acc: BTreeMap<i64, T> = BTreeMap::new();
    for (&la, &pa) in a.labels().iter().zip(a.probs()) {
        for (&lb, &pb) in b.labels().iter().zip(b.probs()) {
            let e = acc.entry(la + lb).or_insert(T::zero());
            *e = *e + pa * pb;
        }
    }
    let (labels, probs): (Vec<i64>, Vec<T>) = acc.into_iter().unzip();
    DiscreteDistribution { labels, probs }
}

/// Circular convolution of two densities on the same grid.
pub fn convolve_circular<T: Real>(a: &CircularDensity<T>, b: &CircularDensity<T>) -> Result<CircularDensity<T>> {
    let n = a.grid_size();
    if n != b.grid_size() || (a.period - b.period).abs() > T::tol(1e-12) * a.period {
        return Err(Error::GridMismatch);
    }
    let h = a.spacing();
    let values = (0..n)
        .map(|k| (0..n).map(|j| a.values[j] * b.values[(k + n - j) % n]).sum::<T>() * h)
        .collect();
    let start = (a.start + b.start) % a.period;
    CircularDensity::new(a.period, start, values)
}

/// `(C r)(y) = sum_j r(y + j m)`: folds an integer-valued distribution onto
/// `offset, ..., offset + modulus - 1`.
pub fn wrap_discrete<T: Real>(d: &DiscreteDistribution<T>, modulus: i64, offset: i64) -> Result<DiscreteDistribution<T>> {
    if modulus <= 0 {
        return Err(invalid("modulus must be positive"));
    }
    let mut probs = vec![T::zero(); modulus as usize];
    for (&l, &p) in d.labels().iter().zip(d.probs()) {
        let k = (l - offset).rem_euclid(modulus) as usize;
        probs[k] = probs[k] + p;
    }
    DiscreteDistribution::new((offset..offset + modulus).collect(), probs)
}

/// `(C r)(y) = sum_j r(y + j l)` for `y` in `[start, start + l)`. The grid spacing must divide
/// `l`, and `start` must sit on the grid (mod the spacing).
pub fn wrap_mod_interval<T: Real>(r: &RealLineDensity<T>, length: T, start: T) -> Result<CircularDensity<T>> {
    let h = r.spacing();
    let cells = length / h;
    let m = cells.round();
    if m < T::one() || (cells - m).abs() > T::tol(1e-9) * cells.max(T::one()) {
        return Err(invalid("interval length is not a whole number of grid cells"));
    }
    let shift = (r.start() - start) / h;
    let s = shift.round();
    if (shift - s).abs() > T::tol(1e-6) {
        return Err(invalid("interval start is not aligned with the density grid"));
    }
    let m = m.to_i64().unwrap();
    let s = s.to_i64().unwrap();
    let mut values = vec![T::zero(); m as usize];
    for (i, &v) in r.values().iter().enumerate() {
        let k = (i as i64 + s).rem_euclid(m) as usize;
        values[k] = values[k] + v;
    }
    CircularDensity::new(length, start, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_snapping_and_conjugates() {
        assert_eq!(RenyiOrder::new(1.0 + 1e-10).unwrap(), RenyiOrder::<f64>::Shannon);
        assert_eq!(RenyiOrder::new(1e12).unwrap(), RenyiOrder::<f64>::Infinite);
        assert_eq!(RenyiOrder::<f64>::half().conjugate().unwrap(), RenyiOrder::Infinite);
        assert_eq!(RenyiOrder::<f64>::Infinite.conjugate().unwrap(), RenyiOrder::half());
        assert_eq!(RenyiOrder::<f64>::Shannon.conjugate().unwrap(), RenyiOrder::Shannon);
        assert_eq!(RenyiOrder::new(2.0).unwrap().conjugate().unwrap(), RenyiOrder::Finite(2.0 / 3.0));
        assert!(RenyiOrder::new(0.3).unwrap().conjugate().is_err());
        assert!(RenyiOrder::<f64>::new(-1.0).is_err());
    }

    #[test]
    fn uniform_distribution_entropy_is_log_n() {
        let d = DiscreteDistribution::<f64>::uniform((0..4).collect());
        for a in [0.0, 0.5, 1.0, 2.0, f64::INFINITY] {
            let h = renyi_entropy(&d, RenyiOrder::new(a).unwrap());
            assert!((h - 4f64.ln()).abs() < 1e-15, "alpha={a}");
        }
    }

    #[test]
    fn order_zero_counts_support() {
        let d = DiscreteDistribution::<f64>::from_probs(vec![0.5, 0.5, 0.0]).unwrap();
        assert!((renyi_entropy(&d, RenyiOrder::Finite(0.0)) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn divergence_infinite_off_support() {
        let p = DiscreteDistribution::<f64>::from_probs(vec![0.5, 0.5]).unwrap();
        let q = DiscreteDistribution::<f64>::from_probs(vec![1.0, 0.0]).unwrap();
        assert!(classical_relative_entropy(&p, &q, RenyiOrder::Finite(2.0)).unwrap().is_infinite());
        assert!(classical_relative_entropy(&p, &q, RenyiOrder::Shannon).unwrap().is_infinite());
        let half = classical_relative_entropy(&p, &q, RenyiOrder::half()).unwrap();
        assert!((half - 2.0 * 2f64.sqrt().ln()).abs() < 1e-12);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let p = DiscreteDistribution::<f64>::from_probs(vec![0.5, 0.5]).unwrap();
        let q = DiscreteDistribution::<f64>::new(vec![1, 2], vec![0.5, 0.5]).unwrap();
        assert!(matches!(classical_relative_entropy(&p, &q, RenyiOrder::Shannon), Err(Error::GridMismatch)));
    }

    #[test]
    fn deterministic_binary_channel_has_one_bit() {
        let prior = DiscreteDistribution::<f64>::from_probs(vec![0.5, 0.5]).unwrap();
        let ch = vec![
            DiscreteDistribution::from_probs(vec![1.0, 0.0]).unwrap(),
            DiscreteDistribution::from_probs(vec![0.0, 1.0]).unwrap(),
        ];
        let i2 = sibson_mutual_information(&prior, &ch, RenyiOrder::Finite(2.0)).unwrap();
        assert!((i2 - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn wrapping_folds_mass() {
        let d = DiscreteDistribution::<f64>::new(vec![-1, 0, 3], vec![0.25, 0.25, 0.5]).unwrap();
        let w = wrap_discrete(&d, 2, 0).unwrap();
        assert_eq!(w.probs(), &[0.25, 0.75]);
    }

    #[test]
    fn circular_convolution_with_uniform_is_uniform() {
        let period = std::f64::consts::TAU;
        let a = CircularDensity::from_fn(period, 0.0, 64, |x| (1.0 + x.cos()) / period).unwrap();
        let u = CircularDensity::uniform(period, 0.0, 64);
        let c = convolve_circular(&a, &u).unwrap();
        assert!(c.values().iter().all(|v| (v - 1.0 / period).abs() < 1e-14));
    }
}
