//! Discrete energy spectra and their commensurability structure.

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Relative tolerance for treating two frequencies as rationally related.
pub const COMMENSURABILITY_TOL: f64 = 1e-9;

/// Relative tolerance for a continued-fraction convergent to count as an exact gap ratio.
/// With denominators up to `MAX_DENOMINATOR` a random pair passes with probability about
/// `1e6 * RATIO_TOL`.
const RATIO_TOL: f64 = 1e-12;

/// Largest denominator accepted when rationalizing a frequency ratio.
const MAX_DENOMINATOR: i64 = 1000;

/// Largest common multiple of denominators before a class is declared incommensurate.
const MAX_MULTIPLE: i64 = 100_000;

/// Largest coefficient tried when searching for integer relations between class generators.
const RELATION_SEARCH: i64 = 6;
const MAX_SEARCH_RANK: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Periodicity {
    Periodic { period: f64 },
    AlmostPeriodic,
}

/// Level `k` sits at `E_min + sum_c coords[k][c] * generators[c]`. When `independent` holds the
/// generators have no small integer relation and the time orbit fills the torus they span.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusStructure {
    pub generators: Vec<f64>,
    pub coords: Vec<Vec<i64>>,
    pub independent: bool,
}

impl TorusStructure {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// `max_k |coords[k][c]|` per generator.
    pub fn max_coords(&self) -> Vec<i64> {
        (0..self.rank()).map(|c| self.coords.iter().map(|v| v[c].abs()).max().unwrap_or(0)).collect()
    }
}

/// Distinct energy levels (`hbar = 1`), each with the same degeneracy. Basis order is
/// `|E_k> (x) |d>`.
#[derive(Clone, Debug, Serialize)]
pub struct EnergySpectrum {
    levels: Vec<f64>,
    degeneracy: usize,
    periodicity: Periodicity,
    torus: TorusStructure,
}

#[derive(Serialize, Deserialize)]
struct SpectrumJson {
    levels: Vec<f64>,
    #[serde(default = "one")]
    degeneracy: usize,
}

fn one() -> usize {
    1
}

/// Continued-fraction convergent `p/q` of `x > 0` within `tol * x`, if one exists with
/// `q <= max_den`.
pub fn rationalize(x: f64, tol: f64, max_den: i64) -> Option<(i64, i64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e12 {
            return None;
        }
        let a = a as i64;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > max_den {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol * x.abs().max(1.0) {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac <= 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// Best convergent of `x > 0` with denominator at most `max_den`.
fn best_convergent(x: f64, max_den: i64) -> (i64, i64) {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor() as i64;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    (h1, k1)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

/// Groups the gaps into classes of pairwise commensurate values.
fn classify(gaps: &[f64]) -> TorusStructure {
    let scale = gaps.iter().fold(0.0f64, |m, &g| m.max(g));
    let zero = COMMENSURABILITY_TOL * scale.max(f64::MIN_POSITIVE);
    let mut order: Vec<usize> = (0..gaps.len()).filter(|&k| gaps[k] > zero).collect();
    order.sort_by(|&a, &b| gaps[a].total_cmp(&gaps[b]));
    // (reference gap, members as (level, p, q) with gap = reference * p / q)
    let mut classes: Vec<(f64, Vec<(usize, i64, i64)>)> = Vec::new();
    'levels: for &k in &order {
        for (r, members) in classes.iter_mut() {
            if let Some((p, q)) = rationalize(gaps[k] / *r, RATIO_TOL, MAX_DENOMINATOR) {
                let l = members.iter().fold(q, |acc, &(_, _, q2)| lcm(acc, q2));
                if l <= MAX_MULTIPLE {
                    members.push((k, p, q));
                    continue 'levels;
                }
            }
        }
        classes.push((gaps[k], vec![(k, 1, 1)]));
    }
    let mut generators = Vec::with_capacity(classes.len());
    let mut coords = vec![vec![0i64; classes.len()]; gaps.len()];
    for (c, (r, members)) in classes.iter().enumerate() {
        let l = members.iter().fold(1, |acc, &(_, _, q)| lcm(acc, q));
        let mut g = members.iter().fold(0, |acc, &(_, p, q)| gcd(acc, p * (l / q)));
        if g == 0 {
            g = 1;
        }
        generators.push(r * g as f64 / l as f64);
        for &(k, p, q) in members {
            coords[k][c] = p * (l / q) / g;
        }
    }
    let independent = !has_small_relation(&generators);
    TorusStructure { generators, coords, independent }
}

/// Searches `sum_c m_c w_c = 0` with `0 < max |m_c| <= RELATION_SEARCH`, for three or more
/// generators (pairs are excluded by construction). More than `MAX_SEARCH_RANK` generators are
/// not searched and count as related.
fn has_small_relation(w: &[f64]) -> bool {
    let r = w.len();
    if r < 3 {
        return false;
    }
    if r > MAX_SEARCH_RANK {
        return true;
    }
    let scale = w.iter().fold(0.0f64, |m, &x| m.max(x));
    let span = 2 * RELATION_SEARCH + 1;
    let total = (span as u64).pow(r as u32);
    for code in 0..total {
        let mut c = code;
        let mut sum = 0.0;
        let mut nonzero = false;
        for &x in w {
            let m = (c % span as u64) as i64 - RELATION_SEARCH;
            c /= span as u64;
            nonzero |= m != 0;
            sum += m as f64 * x;
        }
        if nonzero && sum.abs() <= 1e3 * RATIO_TOL * scale {
            return true;
        }
    }
    false
}

impl EnergySpectrum {
    pub fn new(levels: Vec<f64>, degeneracy: usize) -> Result<Self> {
        if levels.is_empty() {
            return Err(invalid("energy spectrum has no levels"));
        }
        if degeneracy == 0 {
            return Err(invalid("degeneracy must be at least 1"));
        }
        if levels.iter().any(|e| !e.is_finite()) {
            return Err(invalid("energy levels must be finite"));
        }
        let e0 = levels.iter().fold(f64::INFINITY, |m, &e| m.min(e));
        let gaps: Vec<f64> = levels.iter().map(|e| e - e0).collect();
        let scale = gaps.iter().fold(0.0f64, |m, &g| m.max(g)).max(e0.abs()).max(1.0);
        let mut sorted = levels.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[1] - w[0] <= 1e-12 * scale) {
            return Err(invalid("energy levels must be distinct; use the degeneracy field for repeated levels"));
        }
        let torus = classify(&gaps);
        let periodicity = match torus.rank() {
            0 => Periodicity::Periodic { period: TAU },
            1 => Periodicity::Periodic { period: TAU / torus.generators[0] },
            _ => Periodicity::AlmostPeriodic,
        };
        Ok(Self { levels, degeneracy, periodicity, torus })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: SpectrumJson = serde_json::from_str(s)?;
        Self::new(doc.levels, doc.degeneracy)
    }

    /// `{"levels": [...], "degeneracy": d}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SpectrumJson { levels: self.levels.clone(), degeneracy: self.degeneracy }).expect("serializable spectrum")
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn degeneracy(&self) -> usize {
        self.degeneracy
    }

    /// Hilbert-space dimension, levels times degeneracy.
    pub fn dim(&self) -> usize {
        self.levels.len() * self.degeneracy
    }

    pub fn periodicity(&self) -> Periodicity {
        self.periodicity
    }

    pub fn period(&self) -> Option<f64> {
        match self.periodicity {
            Periodicity::Periodic { period } => Some(period),
            Periodicity::AlmostPeriodic => None,
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.period().is_some()
    }

    pub fn torus(&self) -> &TorusStructure {
        &self.torus
    }

    pub fn ground_energy(&self) -> f64 {
        self.levels.iter().fold(f64::INFINITY, |m, &e| m.min(e))
    }

    /// `(omega, n_k)` with `E_k = E_min + omega n_k`, for periodic spectra with at least two levels.
    pub fn harmonic_form(&self) -> Option<(f64, Vec<i64>)> {
        if self.torus.rank() != 1 {
            return None;
        }
        Some((self.torus.generators[0], self.torus.coords.iter().map(|v| v[0]).collect()))
    }

    /// All differences `E_k - E_k'`, non-negative and deduplicated, starting with 0.
    pub fn frequencies(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let scale = self.levels.iter().fold(0.0f64, |m, &e| m.max((e - self.ground_energy()).abs())).max(1.0);
        for &a in &self.levels {
            for &b in &self.levels {
                let d = a - b;
                if d > 0.0 && !out.iter().any(|&x| (x - d).abs() <= COMMENSURABILITY_TOL * scale) {
                    out.push(d);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Nearby periodic spectrum: every gap, in units of the smallest one, replaced by its best
    /// rational approximation with denominator at most `max_denominator`.
    pub fn periodic_approximation(&self, max_denominator: i64) -> Result<Self> {
        if max_denominator < 1 {
            return Err(invalid("denominator bound must be positive"));
        }
        let e0 = self.ground_energy();
        let gaps: Vec<f64> = self.levels.iter().map(|e| e - e0).collect();
        let r = gaps.iter().filter(|&&g| g > 0.0).fold(f64::INFINITY, |m, &g| m.min(g));
        if !r.is_finite() {
            return Ok(self.clone());
        }
        let levels = gaps
            .iter()
            .map(|&g| {
                if g == 0.0 {
                    e0
                } else {
                    let (p, q) = best_convergent(g / r, max_denominator);
                    e0 + r * p as f64 / q as f64
                }
            })
            .collect();
        Self::new(levels, self.degeneracy)
    }
}
