//! The almost-periodic time density `p_ap(t) = tr[rho M_t]` of the canonical time observable,
//! its Besicovitch means and Renyi entropies.
//!
//! With `w_k(t) = e^{-i E_k t}` and `rho` reduced over the degeneracy factor,
//! `p_ap(t) = sum_{k,k'} rho_{k'k} e^{-i(E_k - E_k')t} = w^dagger rho w >= 0`.
//! Means of `F(p_ap)` are computed one of three ways: a single-period average for periodic
//! spectra, a grid average over the torus swept by the level phases when the gap classes are
//! rationally independent, and Cesaro window averages otherwise (or on request).

use super::spectrum::{EnergySpectrum, COMMENSURABILITY_TOL};
use crate::entropy::{renyi_entropy, CircularDensity, RenyiOrder};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{expi, Complex};
use crate::spectral::{partial_trace, DensityOperator};
use serde::Serialize;
use std::f64::consts::TAU;

/// Tolerance on `Im p_ap` and on negative values.
const REALITY_TOL: f64 = 1e-9;

/// Torus grids larger than this fall back to window averages.
const MAX_TORUS_NODES: usize = 1 << 26;

/// Minimum number of single-period quadrature nodes.
const PERIOD_NODES: usize = 1 << 14;

#[derive(Clone, Debug, Serialize)]
pub struct AlmostPeriodicDensity {
    /// Distinct non-negative frequencies, `0` first.
    pub frequencies: Vec<f64>,
    /// `c_nu = sum_{E_k' - E_k = nu} <E_k'|tr_D rho|E_k>`, so that
    /// `p_ap(t) = c_0 + 2 Re sum_{nu > 0} c_nu e^{i nu t}`.
    pub coefficients: Vec<Complex<f64>>,
    levels: Vec<f64>,
    #[serde(skip)]
    reduced: Matrix<f64>,
    #[serde(skip)]
    spectrum: EnergySpectrum,
}

/// Reduced state `tr_D rho` on the level factor.
fn reduce(rho: &DensityOperator<f64>, spectrum: &EnergySpectrum) -> Result<Matrix<f64>> {
    if rho.dim() != spectrum.dim() {
        return Err(Error::DimensionMismatch { expected: spectrum.dim(), found: rho.dim() });
    }
    if spectrum.degeneracy() == 1 {
        return Ok(rho.matrix().matrix().clone());
    }
    let r = partial_trace(rho, &[0], &[spectrum.levels().len(), spectrum.degeneracy()])?;
    Ok(r.matrix().matrix().clone())
}

/// Builds `p_ap` for `rho` written in the `|E_k> (x) |d>` basis of `spectrum`.
pub fn almost_periodic_density(rho: &DensityOperator<f64>, spectrum: &EnergySpectrum) -> Result<AlmostPeriodicDensity> {
    let reduced = reduce(rho, spectrum)?;
    let levels = spectrum.levels().to_vec();
    let frequencies = spectrum.frequencies();
    let scale = levels.iter().fold(0.0f64, |m, &e| m.max((e - spectrum.ground_energy()).abs())).max(1.0);
    let mut coefficients = vec![Complex::new(0.0, 0.0); frequencies.len()];
    for (k, &ek) in levels.iter().enumerate() {
        for (kp, &ekp) in levels.iter().enumerate() {
            let nu = ekp - ek;
            if nu < -COMMENSURABILITY_TOL * scale {
                continue;
            }
            let j = frequencies
                .iter()
                .position(|&f| (f - nu.max(0.0)).abs() <= COMMENSURABILITY_TOL * scale)
                .expect("every level difference is a listed frequency");
            if k == kp || j > 0 {
                coefficients[j] += reduced[(kp, k)];
            }
        }
    }
    let density = AlmostPeriodicDensity { frequencies, coefficients, levels, reduced, spectrum: spectrum.clone() };
    density.verify()?;
    Ok(density)
}

impl AlmostPeriodicDensity {
    pub fn spectrum(&self) -> &EnergySpectrum {
        &self.spectrum
    }

    /// Reduced state on the level factor.
    pub fn reduced_state(&self) -> &Matrix<f64> {
        &self.reduced
    }

    /// `p_ap(t)` from the Fourier coefficients.
    pub fn eval(&self, t: f64) -> f64 {
        let mut s = self.coefficients[0].re;
        for (nu, c) in self.frequencies.iter().zip(&self.coefficients).skip(1) {
            s += 2.0 * (c * expi(nu * t)).re;
        }
        s
    }

    /// `p_ap` as the quadratic form `w^dagger rho w`, for level phases `phi_k` standing in
    /// for `E_k t`.
    pub fn eval_phases(&self, phases: &[f64]) -> f64 {
        let w: Vec<Complex<f64>> = phases.iter().map(|&p| expi(-p)).collect();
        let mut s = Complex::new(0.0, 0.0);
        for (a, wa) in w.iter().enumerate() {
            let mut row = Complex::new(0.0, 0.0);
            for (b, wb) in w.iter().enumerate() {
                row += self.reduced[(a, b)] * wb;
            }
            s += wa.conj() * row;
        }
        s.re
    }

    /// Reality and non-negativity on a sample of times, and unit mean.
    fn verify(&self) -> Result<()> {
        let c0 = self.coefficients[0];
        if (c0.re - 1.0).abs() > 1e-8 || c0.im.abs() > REALITY_TOL {
            return Err(Error::NotNormalized { mass: c0.re });
        }
        let span = TAU / self.frequencies.get(1).copied().unwrap_or(1.0);
        for i in 0..257 {
            let t = span * i as f64 / 64.0;
            let v = self.eval(t);
            if v < -REALITY_TOL {
                return Err(Error::NegativeProbability(v));
            }
            let phases: Vec<f64> = self.levels.iter().map(|e| e * t).collect();
            if (self.eval_phases(&phases) - v).abs() > 1e-8 {
                return Err(crate::error::invalid("Fourier and quadratic forms of the density disagree"));
            }
        }
        Ok(())
    }

    /// Periodic density `p_ap / tau` on `[0, tau)` sampled at `n` points; `None` for
    /// almost-periodic spectra.
    pub fn periodic_density(&self, n: usize) -> Option<Result<CircularDensity<f64>>> {
        let tau = self.spectrum.period()?;
        Some(CircularDensity::from_fn(tau, 0.0, n, |t| self.eval(t).max(0.0) / tau))
    }
}

/// Parameters of the Cesaro window schedule `s_m = 2^m s_0`, `s_0 = base_scale / min gap`
/// between distinct frequencies.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WindowSchedule {
    pub windows: usize,
    pub base_scale: f64,
    /// The limsup is estimated as the largest of the last `tail` window averages.
    pub tail: usize,
    /// Midpoint nodes per period of the highest frequency.
    pub samples_per_cycle: usize,
    /// Upper limit on function evaluations; later windows are dropped to fit.
    pub max_samples: usize,
    /// Largest tail spread accepted as converged.
    pub spread_tol: f64,
}

impl Default for WindowSchedule {
    fn default() -> Self {
        Self { windows: 17, base_scale: 100.0, tail: 3, samples_per_cycle: 16, max_samples: 1 << 27, spread_tol: 1e-5 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MeanMethod {
    /// Period average, torus average or windows, whichever applies first.
    Auto,
    Windowed,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeanOptions {
    pub method: MeanMethod,
    pub schedule: WindowSchedule,
    /// Torus grid points, split evenly between dimensions.
    pub torus_budget: usize,
}

impl Default for MeanOptions {
    fn default() -> Self {
        Self { method: MeanMethod::Auto, schedule: WindowSchedule::default(), torus_budget: 1 << 21 }
    }
}

impl MeanOptions {
    pub fn windowed() -> Self {
        Self { method: MeanMethod::Windowed, ..Self::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MeanKind {
    Period,
    Torus,
    Windowed,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeanEstimate {
    pub value: f64,
    /// Largest sample of the integrand, used for the order-infinity entropy.
    pub sup: f64,
    pub kind: MeanKind,
    pub windows_used: usize,
    /// Max minus min over the tail windows, `0` for exact quadratures.
    pub spread: f64,
    pub window_values: Vec<f64>,
    pub converged: bool,
}

/// Cesaro averages `(1/s_m) int_0^{s_m} f` on the nested windows `s_m = 2^m s_0`, by a
/// midpoint rule with step `s_0 / n_0`. Returns the averages and the largest sample.
pub fn cesaro_windows(f: impl Fn(f64) -> f64, min_gap: f64, max_frequency: f64, schedule: &WindowSchedule) -> (Vec<f64>, f64) {
    let s0 = schedule.base_scale / min_gap;
    let n0 = ((s0 * max_frequency * schedule.samples_per_cycle as f64 / TAU).ceil() as usize).max(schedule.samples_per_cycle);
    let h = s0 / n0 as f64;
    let mut windows = schedule.windows;
    while windows > 1 && n0.saturating_mul(1usize << (windows - 1)) > schedule.max_samples {
        windows -= 1;
    }
    let mut averages = Vec::with_capacity(windows);
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut sup = f64::NEG_INFINITY;
    let mut i = 0usize;
    for m in 0..windows {
        let end = n0 << m;
        while i < end {
            let v = f((i as f64 + 0.5) * h);
            sup = sup.max(v);
            // Kahan summation keeps the long sums accurate.
            let y = v - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            i += 1;
        }
        averages.push(sum / end as f64);
    }
    (averages, sup)
}

fn windowed_mean(density: &AlmostPeriodicDensity, f: &dyn Fn(f64) -> f64, schedule: &WindowSchedule) -> MeanEstimate {
    let freqs = density.spectrum.frequencies();
    let mut min_gap = f64::INFINITY;
    for (i, a) in freqs.iter().enumerate() {
        for b in &freqs[i + 1..] {
            min_gap = min_gap.min((a - b).abs());
        }
    }
    if !min_gap.is_finite() {
        let v = f(density.eval(0.0));
        return MeanEstimate { value: v, sup: v, kind: MeanKind::Windowed, windows_used: 1, spread: 0.0, window_values: vec![v], converged: true };
    }
    let max_freq = freqs.iter().fold(0.0f64, |m, &x| m.max(x));
    let (averages, sup) = cesaro_windows(|t| f(density.eval(t).max(0.0)), min_gap, max_freq, schedule);
    let tail = &averages[averages.len().saturating_sub(schedule.tail.max(1))..];
    let value = tail.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    let low = tail.iter().fold(f64::INFINITY, |m, &x| m.min(x));
    let spread = value - low;
    let converged = averages.len() == schedule.windows && spread <= schedule.spread_tol * value.abs().max(1.0);
    MeanEstimate { value, sup, kind: MeanKind::Windowed, windows_used: averages.len(), spread, window_values: averages, converged }
}

/// Grid size per torus direction: the budget split evenly, but at least 8 nodes per harmonic.
fn torus_nodes(density: &AlmostPeriodicDensity, budget: usize) -> Vec<usize> {
    let torus = density.spectrum.torus();
    let r = torus.rank();
    let per_dim = (budget as f64).powf(1.0 / r as f64).floor() as usize;
    torus
        .max_coords()
        .iter()
        .map(|&m| {
            let floor = if r == 1 { PERIOD_NODES } else { 8 };
            per_dim.max(floor).max(8 * (2 * m as usize + 1))
        })
        .collect()
}

/// Grid average over the torus of level phases `phi_k = sum_c coords[k][c] theta_c`.
fn torus_mean(density: &AlmostPeriodicDensity, f: &dyn Fn(f64) -> f64, budget: usize) -> MeanEstimate {
    let torus = density.spectrum.torus();
    let r = torus.rank();
    if r == 0 {
        let v = f(density.eval(0.0));
        return MeanEstimate { value: v, sup: v, kind: MeanKind::Period, windows_used: 0, spread: 0.0, window_values: vec![], converged: true };
    }
    let nodes = torus_nodes(density, budget);
    let total: usize = nodes.iter().product();
    let levels = density.levels.len();
    // tables[c][i * levels + k] = exp(-i coords[k][c] theta_{c,i}); the level weight at a node is
    // the product over torus directions.
    let tables: Vec<Vec<Complex<f64>>> = nodes
        .iter()
        .enumerate()
        .map(|(c, &n)| {
            (0..n)
                .flat_map(|i| {
                    let theta = TAU * i as f64 / n as f64;
                    torus.coords.iter().map(move |ck| expi(-(ck[c] as f64) * theta))
                })
                .collect()
        })
        .collect();
    let rho = &density.reduced;
    let mut idx = vec![0usize; r];
    let mut w = vec![Complex::new(0.0, 0.0); levels];
    let mut sum = 0.0;
    let mut sup = f64::NEG_INFINITY;
    for _ in 0..total {
        for (k, wk) in w.iter_mut().enumerate() {
            *wk = tables[0][idx[0] * levels + k];
            for c in 1..r {
                *wk *= tables[c][idx[c] * levels + k];
            }
        }
        let mut p = 0.0;
        for a in 0..levels {
            p += rho[(a, a)].re * w[a].norm_sqr();
            let mut off = Complex::new(0.0, 0.0);
            for b in a + 1..levels {
                off += rho[(a, b)] * w[b];
            }
            p += 2.0 * (w[a].conj() * off).re;
        }
        let v = f(p.max(0.0));
        sup = sup.max(v);
        sum += v;
        for (i, n) in idx.iter_mut().zip(&nodes) {
            *i += 1;
            if *i < *n {
                break;
            }
            *i = 0;
        }
    }
    let kind = if r == 1 { MeanKind::Period } else { MeanKind::Torus };
    MeanEstimate { value: sum / total as f64, sup, kind, windows_used: 0, spread: 0.0, window_values: vec![], converged: true }
}

/// Besicovitch mean `limsup (1/s) int_0^s F(p_ap(t)) dt` of a function of the density value.
pub fn besicovitch_mean(density: &AlmostPeriodicDensity, f: impl Fn(f64) -> f64, opts: &MeanOptions) -> MeanEstimate {
    let torus = density.spectrum.torus();
    match opts.method {
        MeanMethod::Auto
            if (torus.rank() <= 1 || torus.independent)
                && torus_nodes(density, opts.torus_budget).iter().try_fold(1usize, |a, &n| a.checked_mul(n)).is_some_and(|t| t <= MAX_TORUS_NODES) =>
        {
            torus_mean(density, &f, opts.torus_budget)
        }
        _ => windowed_mean(density, &f, &opts.schedule),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ApEntropy {
    pub alpha: String,
    pub value: f64,
    pub mean: MeanEstimate,
}

fn check_order(order: RenyiOrder<f64>) -> Result<()> {
    match order {
        RenyiOrder::Finite(a) if a < 0.5 => Err(Error::InvalidOrder(a)),
        _ => Ok(()),
    }
}

/// `H_alpha^ap = log mu[p_ap^alpha] / (1 - alpha)`, `-mu[p_ap log p_ap]` at `alpha = 1` and
/// `-log sup p_ap` at infinity, with diagnostics.
pub fn ap_entropy(density: &AlmostPeriodicDensity, order: RenyiOrder<f64>, opts: &MeanOptions) -> Result<ApEntropy> {
    check_order(order)?;
    let (value, mean) = match order {
        RenyiOrder::Shannon => {
            let m = besicovitch_mean(density, |p| if p > 0.0 { -p * p.ln() } else { 0.0 }, opts);
            (m.value, m)
        }
        RenyiOrder::Infinite => {
            let m = besicovitch_mean(density, |p| p, opts);
            (-m.sup.ln(), m)
        }
        RenyiOrder::Finite(a) => {
            let m = besicovitch_mean(density, |p| p.powf(a), opts);
            (m.value.ln() / (1.0 - a), m)
        }
    };
    if !mean.converged {
        return Err(Error::NotConverged(format!(
            "Besicovitch windows did not settle: spread {:e} after {} windows",
            mean.spread, mean.windows_used
        )));
    }
    Ok(ApEntropy { alpha: order.to_string(), value, mean })
}

/// Almost-periodic Renyi entropy of the canonical time observable.
pub fn almost_periodic_renyi_entropy(rho: &DensityOperator<f64>, spectrum: &EnergySpectrum, order: RenyiOrder<f64>) -> Result<f64> {
    Ok(ap_entropy(&almost_periodic_density(rho, spectrum)?, order, &MeanOptions::default())?.value)
}

/// `H_alpha` of the periodic density `p_ap / tau` on `[0, tau)`, sampled at `n` points.
pub fn periodic_time_entropy(density: &AlmostPeriodicDensity, order: RenyiOrder<f64>, n: usize) -> Result<f64> {
    let d = density
        .periodic_density(n)
        .ok_or_else(|| Error::NotPeriodic("the periodic time density needs a periodic spectrum".into()))??;
    Ok(renyi_entropy(&d, order))
}

/// Lower bound `-H_alpha^ap` on the information gained about a uniformly distributed time.
pub fn information_gain_lower_bound(rho: &DensityOperator<f64>, spectrum: &EnergySpectrum, order: RenyiOrder<f64>) -> Result<f64> {
    Ok(-almost_periodic_renyi_entropy(rho, spectrum, order)?)
}

/// One line of an entropy sweep.
#[derive(Clone, Debug, Serialize)]
pub struct EntropySweepRow {
    pub order: String,
    #[serde(rename = "H_ap")]
    pub h_ap: f64,
    pub windows_used: usize,
    pub spread: f64,
}

pub fn entropy_sweep(density: &AlmostPeriodicDensity, orders: &[RenyiOrder<f64>], opts: &MeanOptions) -> Result<Vec<EntropySweepRow>> {
    orders
        .iter()
        .map(|&o| {
            let e = ap_entropy(density, o, opts)?;
            Ok(EntropySweepRow { order: e.alpha, h_ap: e.value, windows_used: e.mean.windows_used, spread: e.mean.spread })
        })
        .collect()
}

/// CSV with header `order,H_ap,windows_used,spread`.
pub fn write_entropy_sweep<W: std::io::Write>(rows: &[EntropySweepRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn plus(levels: Vec<f64>) -> (DensityOperator<f64>, EnergySpectrum) {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![cplx(a, 0.0), cplx(a, 0.0)];
        amps.resize(levels.len(), cplx(0.0, 0.0));
        let rho = DensityOperator::pure_indexed(&amps).unwrap();
        (rho, EnergySpectrum::new(levels, 1).unwrap())
    }

    #[test]
    fn qubit_density_closed_form() {
        let (rho, s) = plus(vec![0.0, 0.7]);
        let d = almost_periodic_density(&rho, &s).unwrap();
        for t in [0.0, 0.3, 2.0, 11.0] {
            assert!((d.eval(t) - (1.0 + (0.7 * t).cos())).abs() < 1e-14);
        }
    }

    #[test]
    fn qubit_means() {
        let (rho, s) = plus(vec![0.0, 0.7]);
        let d = almost_periodic_density(&rho, &s).unwrap();
        let o = MeanOptions::default();
        assert!((besicovitch_mean(&d, |p| p, &o).value - 1.0).abs() < 1e-12);
        assert!((besicovitch_mean(&d, |p| p * p, &o).value - 1.5).abs() < 1e-12);
        assert!((besicovitch_mean(&d, |_| 2.5, &o).value - 2.5).abs() < 1e-12);
        let h = almost_periodic_renyi_entropy(&rho, &s, RenyiOrder::Finite(2.0)).unwrap();
        assert!((h + 1.5f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn eigenstate_has_zero_entropy() {
        let rho = DensityOperator::<f64>::basis_state(1, vec![0, 1, 2]);
        let s = EnergySpectrum::new(vec![0.0, 1.0, 2f64.sqrt()], 1).unwrap();
        for order in [RenyiOrder::half(), RenyiOrder::Shannon, RenyiOrder::Infinite] {
            assert!(almost_periodic_renyi_entropy(&rho, &s, order).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn windowed_path_on_incommensurate_extension() {
        let (rho, s) = plus(vec![0.0, 1.0, 2f64.sqrt()]);
        let d = almost_periodic_density(&rho, &s).unwrap();
        let e = ap_entropy(&d, RenyiOrder::Finite(2.0), &MeanOptions::windowed()).unwrap();
        assert_eq!(e.mean.kind, MeanKind::Windowed);
        assert!((e.value + 1.5f64.ln()).abs() < 1e-4, "{}", e.value);
    }

    #[test]
    fn degeneracy_is_traced_out() {
        // (|E0,d0> + |E1,d1>)/sqrt2 has no coherence between levels after tr_D.
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let rho = DensityOperator::pure_indexed(&[cplx(a, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(a, 0.0)]).unwrap();
        let s = EnergySpectrum::new(vec![0.0, 1.0], 2).unwrap();
        let d = almost_periodic_density(&rho, &s).unwrap();
        assert!(d.coefficients[1].norm() < 1e-15);
    }

    #[test]
    fn csv_header() {
        let (rho, s) = plus(vec![0.0, 1.0]);
        let d = almost_periodic_density(&rho, &s).unwrap();
        let rows = entropy_sweep(&d, &[RenyiOrder::Finite(2.0)], &MeanOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_entropy_sweep(&rows, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("order,H_ap,windows_used,spread\n"));
    }
}
