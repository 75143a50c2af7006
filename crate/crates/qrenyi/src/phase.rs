//! Trigonometric-polynomial densities on the circle `[0, 2 pi)`.
//!
//! Canonical phase densities, error densities of covariant estimators and the phase densities
//! used by the coherence bounds all have the form `p(x) = (1/2pi) sum_k c_k e^{ikx}` with
//! finitely many integer frequencies and `c_{-k} = conj(c_k)`. Moments and `L_2` norms are
//! evaluated exactly from the coefficients; Renyi entropies on a grid.

use crate::entropy::CircularDensity;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{expi, Complex, Real};
use serde::Serialize;
use std::collections::BTreeMap;

/// Golden-section iterations used to refine grid maxima.
const REFINE_ITERATIONS: usize = 80;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrigDensity<T> {
    /// `(k, c_k)` for `k >= 0` in increasing order; negative frequencies are conjugates.
    coeffs: Vec<(i64, Complex<T>)>,
}

impl<T: Real> TrigDensity<T> {
    /// Builds from `(k, c_k)` with `k >= 0`, summing repeated frequencies. The imaginary part
    /// of `c_0` is dropped.
    pub fn from_coefficients(terms: impl IntoIterator<Item = (i64, Complex<T>)>) -> Result<Self> {
        let mut acc: BTreeMap<i64, Complex<T>> = BTreeMap::new();
        for (k, c) in terms {
            if k < 0 {
                return Err(crate::error::invalid("trigonometric coefficients are indexed by k >= 0"));
            }
            let e = acc.entry(k).or_insert(Complex::new(T::zero(), T::zero()));
            *e = *e + c;
        }
        if let Some(c0) = acc.get_mut(&0) {
            c0.im = T::zero();
        }
        Ok(Self { coeffs: acc.into_iter().collect() })
    }

    /// Phase density `<phi|rho|phi>` for kets `|phi> = (2pi)^{-1/2} sum_m e^{i zeta_m} e^{-i m phi} |m>`,
    /// with `rho` written in the `|m>` basis.
    pub fn from_state(rho: &Matrix<T>, labels: &[i64], zeta: Option<&[T]>) -> Result<Self> {
        let n = rho.rows();
        if labels.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: labels.len() });
        }
        if let Some(z) = zeta {
            if z.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: z.len() });
            }
        }
        let mut acc: BTreeMap<i64, Complex<T>> = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                let k = labels[a] - labels[b];
                if k < 0 {
                    continue;
                }
                let phase = zeta.map_or(Complex::new(T::one(), T::zero()), |z| expi(z[b] - z[a]));
                let e = acc.entry(k).or_insert(Complex::new(T::zero(), T::zero()));
                *e = *e + rho[(a, b)] * phase;
            }
        }
        Ok(Self { coeffs: acc.into_iter().collect() })
    }

    pub fn uniform() -> Self {
        Self { coeffs: vec![(0, Complex::new(T::one(), T::zero()))] }
    }

    pub fn coefficients(&self) -> &[(i64, Complex<T>)] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: i64) -> Complex<T> {
        let key = k.abs();
        let c = self.coeffs.iter().find(|(j, _)| *j == key).map_or(Complex::new(T::zero(), T::zero()), |(_, c)| *c);
        if k < 0 {
            c.conj()
        } else {
            c
        }
    }

    /// Largest frequency present.
    pub fn bandwidth(&self) -> i64 {
        self.coeffs.iter().map(|(k, _)| *k).max().unwrap_or(0)
    }

    /// `int_0^{2pi} p`.
    pub fn mass(&self) -> T {
        self.coefficient(0).re
    }

    pub fn eval(&self, x: T) -> T {
        let mut s = T::zero();
        for &(k, c) in &self.coeffs {
            if k == 0 {
                s = s + c.re;
            } else {
                s = s + T::lit(2.0) * (c * expi(x * T::from_i64(k).unwrap())).re;
            }
        }
        s / T::TAU()
    }

    /// `p(x - theta)`.
    pub fn shifted(&self, theta: T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&(k, c)| (k, c * expi(-theta * T::from_i64(k).unwrap()))).collect(),
        }
    }

    /// Samples on `start + i 2pi/n`, clipping rounding negatives at zero. Exactly normalized
    /// for `n` above the bandwidth.
    pub fn sample(&self, n: usize, start: T) -> Result<CircularDensity<T>> {
        let h = T::TAU() / T::from_usize(n).unwrap();
        let values: Vec<T> = (0..n).map(|i| self.eval(start + h * T::from_usize(i).unwrap()).max(T::zero())).collect();
        CircularDensity::unchecked(T::TAU(), start, values)
    }

    /// `int_{c-pi}^{c+pi} (x - c)^2 p(x) dx`, exact.
    pub fn second_moment_about(&self, center: T) -> T {
        let pi = T::PI();
        let mut s = T::zero();
        for &(k, c) in &self.coeffs {
            if k == 0 {
                s = s + c.re * T::lit(2.0 / 3.0) * pi * pi * pi;
            } else {
                let kf = T::from_i64(k).unwrap();
                let sign = if k % 2 == 0 { T::one() } else { -T::one() };
                let ck = c * expi(center * kf);
                s = s + T::lit(2.0) * ck.re * T::lit(4.0) * pi * sign / (kf * kf);
            }
        }
        s / T::TAU()
    }

    /// `int p^2`, exact.
    pub fn l2_norm_squared(&self) -> T {
        let s: T = self.coeffs.iter().map(|&(k, c)| if k == 0 { c.norm_sqr() } else { T::lit(2.0) * c.norm_sqr() }).sum();
        s / T::TAU()
    }

    /// `(sup p, argmax)` from a grid of `n` points refined by golden section.
    pub fn sup(&self, n: usize) -> (T, T) {
        let n = n.max(8 * self.bandwidth() as usize + 8);
        let h = T::TAU() / T::from_usize(n).unwrap();
        let (mut best_x, mut best) = (T::zero(), T::neg_infinity());
        for i in 0..n {
            let x = h * T::from_usize(i).unwrap();
            let v = self.eval(x);
            if v > best {
                best = v;
                best_x = x;
            }
        }
        let (x, v) = golden_max(|x| self.eval(x), best_x - h, best_x + h, REFINE_ITERATIONS);
        if v > best {
            (v, x)
        } else {
            (best, best_x)
        }
    }
}

/// Golden-section maximization of a unimodal function on `[a, b]`.
pub fn golden_max<T: Real>(f: impl Fn(T) -> T, a: T, b: T, iterations: usize) -> (T, T) {
    let r = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let (mut a, mut b) = (a, b);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iterations {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        if (b - a).abs() <= T::epsilon() * (T::one() + a.abs()) {
            break;
        }
    }
    let x = (a + b) * T::lit(0.5);
    (x, f(x))
}
