use crate::input::{load_spectrum, load_state, pad_state, parse_orders, EstimatorSpec, GeneratorSpec};
use crate::{Cli, Command, Common, Family, Format, StateArgs, EXIT_VIOLATION};
use anyhow::{Context, Result};
use qrenyi::entropy::{LogBase, RenyiOrder};
use qrenyi::linalg::Matrix;
use qrenyi::metrology::{
    bounds_report, conjecture_search, heisenberg_constant, maximize_scaling_function, scaling_function_f, violations, BoundRow,
    EstimationScenario, Prior, ProbeFamily, SLACK_TOL,
};
use qrenyi::quantum::{
    asymmetry, asymmetry_numeric, asymmetry_upper_bound, coherence_bounds, coherence_measures, renyi_holevo_with, AsymmetryMethod,
    CoherenceBounds, CoherenceMeasures, SearchOptions, SignalEnsemble, StartReport, PURITY_TOL,
};
use qrenyi::random::haar_unitary;
use qrenyi::spectral::{DensityOperator, Generator};
use qrenyi::time_energy::{
    almost_periodic_density, ap_entropy, corollary9_check, entropy_sweep, time_estimation_bounds, write_entropy_sweep,
    Corollary9Record, MeanKind, MeanOptions, TimeEstimationRecord,
};
use qrenyi::entropy::sibson_mutual_information;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

/// An error in how the command was invoked rather than in its inputs.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Conversion from nats to the requested reporting unit.
#[derive(Clone, Copy)]
struct Units(LogBase);

impl Units {
    fn resolve(common: &Common) -> Result<Self> {
        if common.bits {
            return Ok(Self(LogBase::Bits));
        }
        Ok(Self(LogBase::from_env().context("RENYI_LOG_BASE")?))
    }
    fn e(self, nats: f64) -> f64 {
        self.0.convert(nats)
    }
}

fn search_options(seed: u64) -> SearchOptions {
    let d = SearchOptions::default();
    SearchOptions { seed: d.seed.wrapping_add(seed), ..d }
}

fn orders_of(items: &[String]) -> Result<Vec<RenyiOrder<f64>>> {
    let orders = parse_orders(items)?;
    if orders.is_empty() {
        return Err(usage("the order grid (--alphas) is empty"));
    }
    Ok(orders)
}

fn emit(common: &Common, body: &[u8]) -> Result<()> {
    match &common.output {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body)?;
            Ok(out.flush()?)
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_vec_pretty(value)?;
    s.push(b'\n');
    Ok(s)
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))
}

pub fn run(cli: &Cli) -> Result<u8> {
    let c = &cli.common;
    if c.grid < 16 {
        return Err(usage("--grid must be at least 16"));
    }
    let units = Units::resolve(c)?;
    match &cli.command {
        Command::FCurve { alpha_min, alpha_max, points, format } => f_curve(c, *alpha_min, *alpha_max, *points, *format),
        Command::BoundsReport { state, prior, estimator, id, format, audit } => {
            report(c, units, state, *prior, estimator, id, *format, *audit)
        }
        Command::Asymmetry { state } => asymmetry_cmd(c, units, state),
        Command::Coherence { state } => coherence_cmd(c, units, state),
        Command::HolevoChain { state, cells, half_width, center } => holevo_chain(c, units, state, *cells, *half_width, *center),
        Command::TimeEnergy { state, spectrum, alphas, prior_length, windowed, sweep_csv } => {
            time_energy(c, units, state, spectrum, alphas, *prior_length, *windowed, sweep_csv.as_deref())
        }
        Command::ConjectureSearch { family, size, budget } => {
            let fam = match family {
                Family::TwoTerm => ProbeFamily::TwoTerm { max_n: *size },
                Family::Real => ProbeFamily::RealAmplitudes { dim: *size },
            };
            let r = conjecture_search(fam, *budget, c.seed)?;
            emit(c, &json(&r)?)?;
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct FCurveRow {
    alpha: f64,
    f: f64,
    heisenberg_constant: f64,
    is_max: bool,
}

fn f_curve(c: &Common, lo: f64, hi: f64, points: usize, format: Format) -> Result<u8> {
    if !(lo >= 0.5) {
        return Err(usage(format!("alpha must be at least 1/2, got {lo}")));
    }
    if !(hi >= lo) || points == 0 {
        return Err(usage("need alpha-max >= alpha-min and at least one point"));
    }
    let mut alphas: Vec<f64> = if points == 1 {
        vec![lo]
    } else {
        (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
    };
    let (a_star, _) = maximize_scaling_function();
    let with_max = points > 1 && (lo..=hi).contains(&a_star);
    if with_max {
        alphas.push(a_star);
        alphas.sort_by(f64::total_cmp);
    }
    let mut rows = alphas
        .iter()
        .map(|&a| {
            let o = RenyiOrder::Finite(a);
            Ok(FCurveRow { alpha: a, f: scaling_function_f(o)?, heisenberg_constant: heisenberg_constant(o)?, is_max: false })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = if with_max {
        rows.iter().position(|r| r.alpha == a_star)
    } else {
        (0..rows.len()).max_by(|&i, &j| rows[i].f.total_cmp(&rows[j].f))
    };
    if let Some(i) = best {
        rows[i].is_max = true;
    }
    emit(c, &match format {
        Format::Csv => csv_rows(&rows)?,
        Format::Json => json(&rows)?,
    })?;
    Ok(0)
}

/// Bound rows whose values are entropies and so change with the log base.
const ENTROPIC_ROWS: [&str; 5] =
    ["entropy_tradeoff", "asymmetry_phase_entropy", "asymmetry_tradeoff", "information_lower_bound", "asymmetry_upper_bound"];

fn convert_row(units: Units, mut r: BoundRow) -> BoundRow {
    if ENTROPIC_ROWS.contains(&r.bound_name.as_str()) {
        r.bound_value = units.e(r.bound_value);
        r.measured_value = units.e(r.measured_value);
        r.slack = units.e(r.slack);
    }
    r
}

#[derive(Serialize)]
struct AuditRow {
    scenario_id: String,
    bound_name: String,
    bound_value: f64,
    measured_value: f64,
    slack: f64,
    alpha: String,
    beta: String,
    n_c: usize,
    #[serde(rename = "gridSize")]
    grid_size: usize,
    grid_delta_bound: Option<f64>,
    grid_delta_measured: Option<f64>,
    cutoff_delta_bound: Option<f64>,
    cutoff_delta_measured: Option<f64>,
}

type RowKey = (String, String, String);

fn keyed(rows: &[BoundRow]) -> BTreeMap<RowKey, (f64, f64)> {
    rows.iter().map(|r| ((r.bound_name.clone(), r.alpha.clone(), r.beta.clone()), (r.bound_value, r.measured_value))).collect()
}

fn delta(a: f64, b: f64) -> Option<f64> {
    let d = (a - b).abs();
    (d.is_finite() || (a.is_nan() && b.is_nan())).then_some(if d.is_nan() { 0.0 } else { d })
}

#[allow(clippy::too_many_arguments)]
fn report(c: &Common, units: Units, s: &StateArgs, prior: Prior, est: &EstimatorSpec, id: &str, format: Format, audit: bool) -> Result<u8> {
    let orders = orders_of(&s.alphas)?;
    let rho = load_state(&s.state)?;
    let g = s.generator.build(rho.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let estimator = est.build(&g, &mut rng)?;
    let scn = EstimationScenario::new(rho.clone(), g, prior, estimator)?.with_grid(c.grid);
    let opts = search_options(c.seed);
    let rows = bounds_report(&scn, &orders, id, &opts)?;
    let bad = violations(&rows).len();
    for r in violations(&rows) {
        eprintln!("violated: {} alpha={} slack={:e} (tolerance {SLACK_TOL:e})", r.bound_name, r.alpha, r.slack);
    }
    let body = if audit {
        let fine = keyed(&bounds_report(&scn.clone().with_grid(2 * c.grid), &orders, id, &opts)?);
        let cut = if s.generator == GeneratorSpec::Number && est.extends_to_larger_cutoff() {
            let d2 = 2 * rho.dim();
            let g2 = Generator::number(d2);
            let e2 = est.build(&g2, &mut ChaCha8Rng::seed_from_u64(c.seed))?;
            let s2 = EstimationScenario::new(pad_state(&rho, d2)?, g2, prior, e2)?.with_grid(c.grid);
            Some(keyed(&bounds_report(&s2, &orders, id, &opts)?))
        } else {
            None
        };
        let out: Vec<AuditRow> = rows
            .into_iter()
            .map(|r| {
                let key = (r.bound_name.clone(), r.alpha.clone(), r.beta.clone());
                let pick = |m: Option<&BTreeMap<RowKey, (f64, f64)>>| m.and_then(|m| m.get(&key).copied());
                let gd = pick(Some(&fine));
                let cd = pick(cut.as_ref());
                let scale = if ENTROPIC_ROWS.contains(&r.bound_name.as_str()) { |v: f64, u: Units| u.e(v) } else { |v: f64, _| v };
                let r = convert_row(units, r);
                AuditRow {
                    grid_delta_bound: gd.and_then(|(b, _)| delta(scale(b, units), r.bound_value)),
                    grid_delta_measured: gd.and_then(|(_, m)| delta(scale(m, units), r.measured_value)),
                    cutoff_delta_bound: cd.and_then(|(b, _)| delta(scale(b, units), r.bound_value)),
                    cutoff_delta_measured: cd.and_then(|(_, m)| delta(scale(m, units), r.measured_value)),
                    scenario_id: r.scenario_id,
                    bound_name: r.bound_name,
                    bound_value: r.bound_value,
                    measured_value: r.measured_value,
                    slack: r.slack,
                    alpha: r.alpha,
                    beta: r.beta,
                    n_c: r.n_c,
                    grid_size: r.grid_size,
                }
            })
            .collect();
        match format {
            Format::Csv => csv_rows(&out)?,
            Format::Json => json(&out)?,
        }
    } else {
        let out: Vec<BoundRow> = rows.into_iter().map(|r| convert_row(units, r)).collect();
        match format {
            Format::Csv => csv_rows(&out)?,
            Format::Json => json(&out)?,
        }
    };
    emit(c, &body)?;
    Ok(if bad > 0 { EXIT_VIOLATION } else { 0 })
}

fn load_with_generator(s: &StateArgs) -> Result<(DensityOperator<f64>, Generator<f64>)> {
    let rho = load_state(&s.state)?;
    let g = s.generator.build(rho.dim())?;
    Ok((rho, g))
}

fn convert_starts(units: Units, starts: &[StartReport]) -> Vec<StartReport> {
    starts.iter().map(|s| StartReport { value: units.e(s.value), ..s.clone() }).collect()
}

#[derive(Serialize)]
struct AsymmetryRow {
    alpha: String,
    beta: String,
    value: f64,
    method: AsymmetryMethod,
    converged: bool,
    /// `H_beta` of the generator distribution.
    upper_bound: f64,
    /// Closed form for pure states.
    duality: Option<f64>,
    /// Numeric infimum over commuting states.
    numeric: f64,
    numeric_converged: bool,
    starts: Vec<StartReport>,
    minimizer: DensityOperator<f64>,
}

fn asymmetry_cmd(c: &Common, units: Units, s: &StateArgs) -> Result<u8> {
    let orders = orders_of(&s.alphas)?;
    let (rho, g) = load_with_generator(s)?;
    let opts = search_options(c.seed);
    let pure = rho.is_pure(PURITY_TOL);
    let rows = orders
        .iter()
        .map(|&o| {
            let best = asymmetry(&rho, &g, o, &opts)?;
            let numeric = if best.method == AsymmetryMethod::NumericInfimum { best.clone() } else { asymmetry_numeric(&rho, &g, o, &opts)? };
            Ok(AsymmetryRow {
                alpha: o.to_string(),
                beta: o.conjugate()?.to_string(),
                value: units.e(best.value),
                method: best.method,
                converged: best.converged,
                upper_bound: units.e(asymmetry_upper_bound(&rho, &g, o)?),
                duality: pure.then(|| units.e(best.value)),
                numeric: units.e(numeric.value),
                numeric_converged: numeric.converged,
                starts: convert_starts(units, &numeric.starts),
                minimizer: best.minimizer,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(c, &json(&rows)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct CoherenceReport {
    measures: CoherenceMeasures<f64>,
    bounds: Vec<CoherenceBounds<f64>>,
}

fn coherence_cmd(c: &Common, units: Units, s: &StateArgs) -> Result<u8> {
    let orders = orders_of(&s.alphas)?;
    let (rho, g) = load_with_generator(s)?;
    let mut m = coherence_measures(&rho, &g, &orders, &search_options(c.seed))?;
    for (_, v) in m.renyi.iter_mut() {
        *v = units.e(*v);
    }
    m.relative_entropy = units.e(m.relative_entropy);
    let bounds = orders
        .iter()
        .map(|&o| {
            let mut b = coherence_bounds(&rho, &g, None, o)?;
            b.lower = units.e(b.lower);
            b.upper = units.e(b.upper);
            b.relative_entropy_lower = units.e(b.relative_entropy_lower);
            Ok(b)
        })
        .collect::<Result<Vec<_>>>()?;
    emit(c, &json(&CoherenceReport { measures: m, bounds })?)?;
    Ok(0)
}

#[derive(Serialize)]
struct ChainRow {
    alpha: String,
    beta: String,
    /// Sibson information of a seeded random projective measurement.
    information: f64,
    holevo: f64,
    asymmetry: f64,
    upper_bound: f64,
    /// `chi - I`, `A - chi`, `H_beta - A`.
    slacks: [f64; 3],
    holds: bool,
}

fn holevo_chain(c: &Common, units: Units, s: &StateArgs, cells: usize, half_width: f64, center: f64) -> Result<u8> {
    let orders = orders_of(&s.alphas)?;
    let (rho, g) = load_with_generator(s)?;
    let opts = search_options(c.seed);
    let ens = SignalEnsemble::uniform_interval(&rho, &g, center, half_width, cells)?;
    let u = haar_unitary(rho.dim(), &mut ChaCha8Rng::seed_from_u64(c.seed));
    let effects: Vec<Matrix<f64>> = (0..rho.dim()).map(|j| Matrix::outer(&u.column(j))).collect();
    let outputs = ens.measure(&effects)?;
    let rows = orders
        .iter()
        .map(|&o| {
            let info = sibson_mutual_information(&ens.prior, &outputs, o)?;
            let a = asymmetry(&rho, &g, o, &opts)?;
            let chi = renyi_holevo_with(&ens, o, &opts, std::slice::from_ref(&a.minimizer))?.value;
            let h = asymmetry_upper_bound(&rho, &g, o)?;
            let slacks = [chi - info, a.value - chi, h - a.value];
            Ok(ChainRow {
                alpha: o.to_string(),
                beta: o.conjugate()?.to_string(),
                information: units.e(info),
                holevo: units.e(chi),
                asymmetry: units.e(a.value),
                upper_bound: units.e(h),
                slacks: slacks.map(|v| units.e(v)),
                holds: slacks.iter().all(|&v| v >= -SLACK_TOL),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ok = rows.iter().all(|r| r.holds);
    emit(c, &json(&rows)?)?;
    Ok(if ok { 0 } else { EXIT_VIOLATION })
}

#[derive(Serialize)]
struct TimeEnergyRow {
    alpha: String,
    ap_entropy: f64,
    mean_kind: MeanKind,
    windows_used: usize,
    spread: f64,
    converged: bool,
    relations: Corollary9Record,
    time_estimation: Option<TimeEstimationRecord>,
}

#[derive(Serialize)]
struct TimeEnergyReport {
    spectrum: serde_json::Value,
    periodic: bool,
    period: Option<f64>,
    note: Option<String>,
    rows: Vec<TimeEnergyRow>,
}

#[allow(clippy::too_many_arguments)]
fn time_energy(
    c: &Common,
    units: Units,
    state: &std::path::Path,
    spectrum: &std::path::Path,
    alphas: &[String],
    prior_length: Option<f64>,
    windowed: bool,
    sweep_csv: Option<&std::path::Path>,
) -> Result<u8> {
    let orders = orders_of(alphas)?;
    let rho = load_state(state)?;
    let spec = load_spectrum(spectrum)?;
    let mean = if windowed { MeanOptions::windowed() } else { MeanOptions::default() };
    let opts = search_options(c.seed);
    let density = almost_periodic_density(&rho, &spec)?;
    let note = (!spec.is_periodic())
        .then(|| "spectrum is not periodic: time RMSE and deviation bounds are undefined and omitted".to_string());
    let rows = orders
        .iter()
        .map(|&o| {
            let h = ap_entropy(&density, o, &mean)?;
            let mut rel = corollary9_check(&rho, &spec, o, &opts, &mean)?;
            rel.asymmetry = units.e(rel.asymmetry);
            rel.ap_entropy = units.e(rel.ap_entropy);
            rel.slack = units.e(rel.slack);
            rel.shannon_slack = units.e(rel.shannon_slack);
            rel.energy_entropy_slack = units.e(rel.energy_entropy_slack);
            let te = match spec.period() {
                Some(tau) => {
                    let mut t = time_estimation_bounds(&rho, &spec, prior_length.unwrap_or(tau), o, &opts)?;
                    t.asymmetry = units.e(t.asymmetry);
                    t.error_entropy = units.e(t.error_entropy);
                    t.tradeoff_slack = units.e(t.tradeoff_slack);
                    t.time_entropy = units.e(t.time_entropy);
                    t.period_entropy_slack = units.e(t.period_entropy_slack);
                    Some(t)
                }
                None => None,
            };
            Ok(TimeEnergyRow {
                alpha: o.to_string(),
                ap_entropy: units.e(h.value),
                mean_kind: h.mean.kind,
                windows_used: h.mean.windows_used,
                spread: h.mean.spread,
                converged: h.mean.converged,
                relations: rel,
                time_estimation: te,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(path) = sweep_csv {
        let mut sweep = entropy_sweep(&density, &orders, &mean)?;
        for r in sweep.iter_mut() {
            r.h_ap = units.e(r.h_ap);
        }
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_entropy_sweep(&sweep, file)?;
    }
    let report = TimeEnergyReport { spectrum: spec.to_json(), periodic: spec.is_periodic(), period: spec.period(), note, rows };
    emit(c, &json(&report)?)?;
    Ok(0)
}
