//! Checkers for the entropic, RMSE and length-deviation bounds on phase and rotation estimates.
//! Every record carries `slack = measured - bound` (or `bound - measured` for upper bounds), so
//! a bound holds when its slack is nonnegative.

use super::povm::{integer_labels, PhasePovm};
use super::scaling::{f_max, heisenberg_constant};
use super::scenario::{error_distribution, interval_error_distribution, ErrorStatistics, EstimationScenario, Prior};
use crate::entropy::{renyi_entropy, renyi_length, DiscreteDistribution, RenyiOrder};
use crate::error::{invalid, Error, Result};
use crate::phase::{golden_max, TrigDensity};
use crate::quantum::{asymmetry, asymmetry_alpha1, SearchOptions};
use crate::spectral::{DensityOperator, Generator, GeneratorKind};
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Slack below which a bound counts as violated.
pub const SLACK_TOL: f64 = 1e-6;

/// Reference angles scanned before refining the minimum phase deviation.
const CHI_GRID: usize = 720;

/// Distribution of the eigenvalues of `g` in `rho`, labelled by integer eigenvalue.
pub fn spectrum_distribution(rho: &DensityOperator<f64>, g: &Generator<f64>) -> Result<DiscreteDistribution<f64>> {
    let ev = &g.decomposition.eigenvalues;
    let labels: Vec<i64> = if ev.iter().all(|x| (x - x.round()).abs() < 1e-9) {
        ev.iter().map(|x| x.round() as i64).collect()
    } else {
        (0..ev.len() as i64).collect()
    };
    DiscreteDistribution::normalized(labels, g.populations(rho))
}

/// `(sum_k p_k^{1/2})^2`.
fn half_length(p: &DiscreteDistribution<f64>) -> f64 {
    renyi_length(p, RenyiOrder::half())
}

fn nonnegative_mean(p: &DiscreteDistribution<f64>) -> Option<f64> {
    if p.labels().iter().all(|&l| l >= 0) {
        Some(p.mean())
    } else {
        None
    }
}

/// `(<|G|>, p(0))`.
fn abs_mean_and_zero(p: &DiscreteDistribution<f64>) -> (f64, f64) {
    let m = p.labels().iter().zip(p.probs()).map(|(&l, &q)| q * (l as f64).abs()).sum();
    (m, p.prob(0))
}

/// `Delta_chi Phi = (int_{chi-pi}^{chi+pi} (phi - chi)^2 p(phi))^{1/2}`.
pub fn phase_deviation(density: &TrigDensity<f64>, chi: f64) -> f64 {
    density.second_moment_about(chi).max(0.0).sqrt()
}

/// `(chi, Delta_chi Phi)` minimizing the deviation over the reference angle.
pub fn min_phase_deviation(density: &TrigDensity<f64>) -> (f64, f64) {
    let h = TAU / CHI_GRID as f64;
    let (mut best_chi, mut best) = (0.0, f64::INFINITY);
    for i in 0..CHI_GRID {
        let chi = i as f64 * h;
        let v = density.second_moment_about(chi);
        if v < best {
            best = v;
            best_chi = chi;
        }
    }
    let (chi, neg) = golden_max(|c| -density.second_moment_about(c), best_chi - h, best_chi + h, 100);
    let v = (-neg).min(best);
    (if -neg <= best { chi } else { best_chi }, v.max(0.0).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem1Record {
    pub alpha: String,
    pub beta: String,
    pub error_entropy: f64,
    pub generator_entropy: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

/// `H_alpha(err) + H_beta(G) >= log 2pi` for a uniform circular prior.
pub fn theorem1_check(scenario: &EstimationScenario, order: RenyiOrder<f64>) -> Result<Theorem1Record> {
    let stats = error_distribution(scenario, &[])?;
    theorem1_from(scenario, &stats, order)
}

fn theorem1_from(scenario: &EstimationScenario, stats: &ErrorStatistics, order: RenyiOrder<f64>) -> Result<Theorem1Record> {
    let beta = order.conjugate()?;
    let he = stats.entropy(order);
    let hg = renyi_entropy(&spectrum_distribution(&scenario.probe, &scenario.generator)?, beta);
    let rhs = TAU.ln();
    Ok(Theorem1Record { alpha: order.to_string(), beta: beta.to_string(), error_entropy: he, generator_entropy: hg, lhs: he + hg, rhs, slack: he + hg - rhs })
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem2Bounds {
    /// `pi / (3^{1/2} L_{1/2}(N))`.
    pub bound1: f64,
    /// `max_n p(n)`.
    pub bound2: f64,
    /// `f_max / (<N> + 1/2)`.
    pub bound3: f64,
}

impl Theorem2Bounds {
    pub fn max(&self) -> f64 {
        self.bound1.max(self.bound2).max(self.bound3)
    }
}

fn number_distribution(probe: &DensityOperator<f64>, g: &Generator<f64>) -> Result<(DiscreteDistribution<f64>, f64)> {
    let p = spectrum_distribution(probe, g)?;
    let mean = nonnegative_mean(&p).ok_or_else(|| invalid("bound needs a generator with nonnegative integer spectrum"))?;
    Ok((p, mean))
}

/// RMSE lower bounds for a uniform circular prior and a nonnegative integer generator.
pub fn theorem2_bounds(probe: &DensityOperator<f64>, g: &Generator<f64>) -> Result<Theorem2Bounds> {
    let (p, mean) = number_distribution(probe, g)?;
    Ok(Theorem2Bounds { bound1: PI / (3f64.sqrt() * half_length(&p)), bound2: p.max_prob(), bound3: f_max() / (mean + 0.5) })
}

#[derive(Clone, Debug, Serialize)]
pub struct FisherComparison {
    pub delta_n: f64,
    /// `1 / (2 Delta N)`, infinite for number states.
    pub fisher_bound: f64,
}

pub fn fisher_comparison(probe: &DensityOperator<f64>, g: &Generator<f64>) -> Result<FisherComparison> {
    if probe.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: probe.dim() });
    }
    let delta_n = g.std_dev(probe);
    let fisher_bound = if delta_n > 1e-12 { 0.5 / delta_n } else { f64::INFINITY };
    Ok(FisherComparison { delta_n, fisher_bound })
}

#[derive(Clone, Debug, Serialize)]
pub struct Corollary1Record {
    pub alpha: String,
    pub beta: String,
    pub chi: f64,
    pub deviation: f64,
    /// `L_beta(N) Delta_chi Phi`.
    pub lhs: f64,
    /// `alpha^{alpha/(alpha-1)} f(alpha)`.
    pub rhs: f64,
    pub slack: f64,
    /// `L_{1/2}(N) Delta - pi/3^{1/2}`.
    pub half_length_slack: f64,
    /// `Delta - max_n p(n)`.
    pub max_prob_slack: f64,
    /// `(<N> + 1/2) Delta - f_max`, for nonnegative spectra.
    pub mean_slack: Option<f64>,
}

impl Corollary1Record {
    pub fn worst_slack(&self) -> f64 {
        self.slack.min(self.half_length_slack).min(self.max_prob_slack).min(self.mean_slack.unwrap_or(f64::INFINITY))
    }
}

fn canonical_density(rho: &DensityOperator<f64>, g: &Generator<f64>) -> Result<TrigDensity<f64>> {
    let labels = integer_labels(g)?;
    if rho.dim() != labels.len() {
        return Err(Error::DimensionMismatch { expected: labels.len(), found: rho.dim() });
    }
    TrigDensity::from_state(rho.matrix().matrix(), &labels, None)
}

/// Length-deviation relations for the canonical phase. `chi = None` minimizes over the reference
/// angle.
pub fn corollary1_check(rho: &DensityOperator<f64>, g: &Generator<f64>, chi: Option<f64>, order: RenyiOrder<f64>) -> Result<Corollary1Record> {
    let beta = order.conjugate()?;
    let density = canonical_density(rho, g)?;
    let (chi, deviation) = match chi {
        Some(c) => (c, phase_deviation(&density, c)),
        None => min_phase_deviation(&density),
    };
    let p = spectrum_distribution(rho, g)?;
    let lhs = renyi_length(&p, beta) * deviation;
    let rhs = heisenberg_constant(order)?;
    Ok(Corollary1Record {
        alpha: order.to_string(),
        beta: beta.to_string(),
        chi,
        deviation,
        lhs,
        rhs,
        slack: lhs - rhs,
        half_length_slack: half_length(&p) * deviation - PI / 3f64.sqrt(),
        max_prob_slack: deviation - p.max_prob(),
        mean_slack: nonnegative_mean(&p).map(|m| (m + 0.5) * deviation - f_max()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntervalRecord {
    pub alpha: String,
    pub length: f64,
    pub error_entropy: f64,
    pub asymmetry: f64,
    /// `H_alpha(err) + A_alpha - log l`.
    pub tradeoff_slack: f64,
    /// `log l - H_alpha(err)`, a lower bound on the Renyi mutual information.
    pub information_lower_bound: f64,
    pub rmse: f64,
    /// `alpha^{alpha/(alpha-1)} f(alpha) l e^{-A_alpha} / 2pi`.
    pub rmse_bound: f64,
    pub rmse_slack: f64,
}

/// Prior-interval relations at one order. `asymmetry` is `A_alpha^G` of the probe.
fn interval_from(scenario: &EstimationScenario, stats: &ErrorStatistics, order: RenyiOrder<f64>, asymmetry: f64) -> Result<IntervalRecord> {
    let l = scenario.prior.length();
    let he = stats.entropy(order);
    let rmse_bound = heisenberg_constant(order)? * l * (-asymmetry).exp() / TAU;
    Ok(IntervalRecord {
        alpha: order.to_string(),
        length: l,
        error_entropy: he,
        asymmetry,
        tradeoff_slack: he + asymmetry - l.ln(),
        information_lower_bound: l.ln() - he,
        rmse: stats.rmse,
        rmse_bound,
        rmse_slack: stats.rmse - rmse_bound,
    })
}

fn stats_for(scenario: &EstimationScenario) -> Result<ErrorStatistics> {
    match scenario.prior {
        Prior::UniformCircle => error_distribution(scenario, &[]),
        Prior::UniformInterval { .. } => interval_error_distribution(scenario, &[]),
    }
}

/// `H_alpha(err) + A_alpha^G >= log l` and the RMSE bound it implies, with `A_alpha^G` from the
/// asymmetry module.
pub fn interval_check(scenario: &EstimationScenario, order: RenyiOrder<f64>, opts: &SearchOptions) -> Result<IntervalRecord> {
    let stats = stats_for(scenario)?;
    let a = asymmetry(&scenario.probe, &scenario.generator, order, opts)?.value;
    interval_from(scenario, &stats, order, a)
}

#[derive(Clone, Debug, Serialize)]
pub struct IntervalRmseBounds {
    /// `l / (2 3^{1/2} L_{1/2}(G))`.
    pub half_length: f64,
    /// `(l / 2pi) max_k p_k`.
    pub max_prob: f64,
    /// `l e^{H(rho) - H(rho_G)} / (2 pi e)^{1/2}`.
    pub entropy: f64,
    /// `(l / 2pi) f_max / (<N> + 1/2)`, for nonnegative spectra.
    pub mean: Option<f64>,
}

impl IntervalRmseBounds {
    pub fn max(&self) -> f64 {
        self.half_length.max(self.max_prob).max(self.entropy).max(self.mean.unwrap_or(0.0))
    }
}

/// Closed-form RMSE bounds for a uniform prior on an interval of length `l`.
pub fn interval_rmse_bounds(probe: &DensityOperator<f64>, g: &Generator<f64>, length: f64) -> Result<IntervalRmseBounds> {
    let p = spectrum_distribution(probe, g)?;
    let a1 = asymmetry_alpha1(probe, g)?;
    Ok(IntervalRmseBounds {
        half_length: length / (2.0 * 3f64.sqrt() * half_length(&p)),
        max_prob: length / TAU * p.max_prob(),
        entropy: length * (-a1).exp() / (TAU * 1f64.exp()).sqrt(),
        mean: nonnegative_mean(&p).map(|m| length / TAU * f_max() / (m + 0.5)),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NonlinearRecord {
    pub alpha: String,
    pub beta: String,
    pub error_entropy: f64,
    /// `H_beta` of the original generator.
    pub generator_entropy: f64,
    pub slack: f64,
}

/// Displacement generated by `h(G)`, entropy of the original `G`:
/// `H_alpha(err) + H_beta(G) >= log l`. The scenario's estimator is used for the `h(G)`
/// displacement.
pub fn nonlinear_generator_check(
    scenario: &EstimationScenario,
    h: impl Fn(f64) -> f64,
    order: RenyiOrder<f64>,
) -> Result<NonlinearRecord> {
    let beta = order.conjugate()?;
    let hg = scenario.generator.map_eigenvalues(h);
    let displaced = EstimationScenario::new(scenario.probe.clone(), hg, scenario.prior, scenario.estimator.clone())?.with_grid(scenario.grid_size);
    let stats = stats_for(&displaced)?;
    let he = stats.entropy(order);
    let hb = renyi_entropy(&spectrum_distribution(&scenario.probe, &scenario.generator)?, beta);
    Ok(NonlinearRecord {
        alpha: order.to_string(),
        beta: beta.to_string(),
        error_entropy: he,
        generator_entropy: hb,
        slack: he + hb - scenario.prior.length().ln(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RotationRecord {
    pub alpha: String,
    pub beta: String,
    /// `L_beta(J_z)`.
    pub length: f64,
    /// `alpha^{alpha/(alpha-1)} (2<|J_z|> + p(0)/2)`.
    pub length_bound: f64,
    /// `alpha^{alpha/(alpha-1)} (2<|J_z|> + 1/2)`.
    pub length_bound_weak: f64,
    pub deviation: f64,
    pub max_prob: f64,
    pub rmse: f64,
    /// `(l/2pi) f_max / (2<|J_z|> + p(0)/2)`.
    pub rmse_bound: f64,
    /// `(l/2pi) f_max / (2<|J_z|> + 1/2)`.
    pub rmse_bound_weak: f64,
}

impl RotationRecord {
    pub fn slacks(&self) -> [(&'static str, f64); 5] {
        [
            ("rotation_length", self.length_bound - self.length),
            ("rotation_length_weak", self.length_bound_weak - self.length_bound),
            ("rotation_deviation", self.deviation - self.max_prob),
            ("rotation_rmse", self.rmse - self.rmse_bound),
            ("rotation_rmse_weak", self.rmse_bound - self.rmse_bound_weak),
        ]
    }
}

/// Angle-estimation bounds for a `J_z` generator with a symmetric spectrum.
pub fn rotation_bounds(scenario: &EstimationScenario, order: RenyiOrder<f64>) -> Result<RotationRecord> {
    let beta = order.conjugate()?;
    let p = spectrum_distribution(&scenario.probe, &scenario.generator)?;
    let (abs_mean, p0) = abs_mean_and_zero(&p);
    let pref = match order {
        RenyiOrder::Infinite => f64::INFINITY,
        o => o.heisenberg_prefactor(),
    };
    let density = canonical_density(&scenario.probe, &scenario.generator)?;
    let stats = stats_for(scenario)?;
    let scale = scenario.prior.length() / TAU * f_max();
    Ok(RotationRecord {
        alpha: order.to_string(),
        beta: beta.to_string(),
        length: renyi_length(&p, beta),
        length_bound: pref * (2.0 * abs_mean + 0.5 * p0),
        length_bound_weak: pref * (2.0 * abs_mean + 0.5),
        deviation: min_phase_deviation(&density).1,
        max_prob: p.max_prob(),
        rmse: stats.rmse,
        rmse_bound: scale / (2.0 * abs_mean + 0.5 * p0),
        rmse_bound_weak: scale / (2.0 * abs_mean + 0.5),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymmetryPhaseRecord {
    pub alpha: String,
    pub asymmetry: f64,
    pub phase_entropy: f64,
    pub deviation: f64,
    /// `A_alpha + H_alpha(Phi) - log 2pi`.
    pub entropy_slack: f64,
    /// `e^{A_alpha} Delta_chi Phi - alpha^{alpha/(alpha-1)} f(alpha)`.
    pub deviation_slack: f64,
}

/// Asymmetry-strengthened number-phase relations:
/// `A_alpha + H_alpha(Phi) >= log 2pi` and `e^{A_alpha} Delta_chi Phi >= alpha^{alpha/(alpha-1)} f(alpha)`.
pub fn asymmetry_phase_check(
    rho: &DensityOperator<f64>,
    g: &Generator<f64>,
    order: RenyiOrder<f64>,
    grid: usize,
    opts: &SearchOptions,
) -> Result<AsymmetryPhaseRecord> {
    let density = canonical_density(rho, g)?;
    let sampled = density.sample(grid, 0.0)?;
    let a = asymmetry(rho, g, order, opts)?.value;
    let hp = renyi_entropy(&sampled, order);
    let deviation = min_phase_deviation(&density).1;
    Ok(AsymmetryPhaseRecord {
        alpha: order.to_string(),
        asymmetry: a,
        phase_entropy: hp,
        deviation,
        entropy_slack: a + hp - TAU.ln(),
        deviation_slack: a.exp() * deviation - heisenberg_constant(order)?,
    })
}

/// `(int (p - 1/2pi)^2` by quadrature, `1/L_2 - 1/2pi` from the grid entropy`)`.
pub fn l2_identity(stats: &ErrorStatistics) -> (f64, f64) {
    let d = &stats.error_density;
    let h = d.spacing();
    let c = 1.0 / TAU;
    let lhs: f64 = crate::entropy::Distribution::values(d).iter().map(|&p| h * (p - c) * (p - c)).sum();
    let l2 = renyi_length(d, RenyiOrder::Finite(2.0));
    (lhs, 1.0 / l2 - c)
}

/// One line of a bounds report.
#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub scenario_id: String,
    pub bound_name: String,
    pub bound_value: f64,
    pub measured_value: f64,
    pub slack: f64,
    pub alpha: String,
    pub beta: String,
    pub n_c: usize,
    #[serde(rename = "gridSize")]
    pub grid_size: usize,
}

struct Rows<'a> {
    id: &'a str,
    n_c: usize,
    grid: usize,
    out: Vec<BoundRow>,
}

impl Rows<'_> {
    fn lower(&mut self, name: &str, bound: f64, measured: f64, alpha: &str, beta: &str) {
        self.push(name, bound, measured, measured - bound, alpha, beta);
    }
    fn upper(&mut self, name: &str, bound: f64, measured: f64, alpha: &str, beta: &str) {
        self.push(name, bound, measured, bound - measured, alpha, beta);
    }
    fn push(&mut self, name: &str, bound: f64, measured: f64, slack: f64, alpha: &str, beta: &str) {
        self.out.push(BoundRow {
            scenario_id: self.id.to_string(),
            bound_name: name.to_string(),
            bound_value: bound,
            measured_value: measured,
            slack,
            alpha: alpha.to_string(),
            beta: beta.to_string(),
            n_c: self.n_c,
            grid_size: self.grid,
        });
    }
}

/// Every applicable bound for the scenario at each order. Informational rows (the Fisher
/// comparison) carry a NaN slack.
pub fn bounds_report(scenario: &EstimationScenario, orders: &[RenyiOrder<f64>], id: &str, opts: &SearchOptions) -> Result<Vec<BoundRow>> {
    if orders.is_empty() {
        return Err(invalid("empty order grid"));
    }
    let stats = stats_for(scenario)?;
    let mut rows = Rows { id, n_c: scenario.probe.dim(), grid: scenario.grid_size, out: Vec::new() };
    let probe = &scenario.probe;
    let g = &scenario.generator;
    let p = spectrum_distribution(probe, g)?;
    let circle = scenario.prior == Prior::UniformCircle;
    let rotation = g.kind == GeneratorKind::AngularMomentumZ;
    let l = scenario.prior.length();

    if circle {
        if let Ok(t2) = theorem2_bounds(probe, g) {
            rows.lower("rmse_half_length", t2.bound1, stats.rmse, "inf", "0.5");
            rows.lower("rmse_max_prob", t2.bound2, stats.rmse, "0.5", "inf");
            rows.lower("rmse_mean", t2.bound3, stats.rmse, "", "");
            let fc = fisher_comparison(probe, g)?;
            rows.push("fisher_comparison", fc.fisher_bound, stats.rmse, f64::NAN, "", "");
        }
    }
    let ib = interval_rmse_bounds(probe, g, l)?;
    rows.lower("interval_rmse_half_length", ib.half_length, stats.rmse, "inf", "0.5");
    rows.lower("interval_rmse_max_prob", ib.max_prob, stats.rmse, "0.5", "inf");
    rows.lower("interval_rmse_entropy", ib.entropy, stats.rmse, "1", "1");
    if let Some(m) = ib.mean {
        rows.lower("interval_rmse_mean", m, stats.rmse, "", "");
    }

    for &order in orders {
        let beta = order.conjugate()?;
        let (a, b) = (order.to_string(), beta.to_string());
        let he = stats.entropy(order);
        let asym = asymmetry(probe, g, order, opts)?.value;
        if circle {
            let t1 = theorem1_from(scenario, &stats, order)?;
            rows.lower("entropy_tradeoff", t1.rhs, t1.lhs, &a, &b);
            let c1 = corollary1_check(probe, g, None, order)?;
            rows.lower("length_deviation", c1.rhs, c1.lhs, &a, &b);
            rows.lower("length_deviation_half", PI / 3f64.sqrt(), c1.half_length_slack + PI / 3f64.sqrt(), "inf", "0.5");
            rows.lower("deviation_max_prob", p.max_prob(), c1.deviation, "0.5", "inf");
            if let Some(s) = c1.mean_slack {
                rows.lower("deviation_mean", f_max(), s + f_max(), "", "");
            }
            let ap = asymmetry_phase_check(probe, g, order, scenario.grid_size, opts)?;
            rows.lower("asymmetry_phase_entropy", TAU.ln(), ap.asymmetry + ap.phase_entropy, &a, &a);
            rows.lower("asymmetry_phase_deviation", heisenberg_constant(order)?, ap.asymmetry.exp() * ap.deviation, &a, &b);
        }
        let ir = interval_from(scenario, &stats, order, asym)?;
        rows.lower("asymmetry_tradeoff", l.ln(), he + asym, &a, &a);
        rows.upper("information_lower_bound", asym, ir.information_lower_bound, &a, &a);
        rows.lower("asymmetry_rmse", ir.rmse_bound, stats.rmse, &a, &b);
        rows.upper("asymmetry_upper_bound", renyi_entropy(&p, beta), asym, &a, &b);
        if rotation {
            let r = rotation_bounds(scenario, order)?;
            rows.upper("rotation_length", r.length_bound, r.length, &a, &b);
            rows.lower("rotation_deviation", r.max_prob, r.deviation, "0.5", "inf");
            rows.lower("rotation_rmse", r.rmse_bound, r.rmse, "", "");
            rows.lower("rotation_rmse_weak", r.rmse_bound_weak, r.rmse, "", "");
        }
    }
    Ok(rows.out)
}

/// Rows with slack below `-SLACK_TOL`.
pub fn violations(rows: &[BoundRow]) -> Vec<&BoundRow> {
    rows.iter().filter(|r| r.slack < -SLACK_TOL).collect()
}

/// Writes rows as CSV.
pub fn write_rows<W: std::io::Write>(rows: &[BoundRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Canonical POVM for a generator, sized to resolve its label differences.
pub fn canonical_povm_for(g: &Generator<f64>) -> Result<PhasePovm> {
    let labels = integer_labels(g)?;
    let span = labels.iter().max().unwrap_or(&0) - labels.iter().min().unwrap_or(&0);
    PhasePovm::from_labels(labels, (2 * span + 2) as usize, None)
}
