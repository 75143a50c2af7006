//! Densities that maximize a Renyi entropy under a moment constraint.
//!
//! Second moment `sigma^2` on the line, order `alpha`:
//! `p(x) = p1(x / lambda) / lambda` with
//! `p1(u) = K (1 + u^2)^{-1/(1-alpha)}` for `alpha < 1`,
//! `p1(u) = K (1 - u^2)^{1/(alpha-1)}` on `|u| <= 1` for `alpha > 1`,
//! `lambda = sigma sqrt((3 alpha - 1) / |1 - alpha|)`; Gaussian at `alpha = 1`.
//!
//! First moment `m` on the half line, order `beta`:
//! `p1(u) = K (1 + u)^{-1/(1-beta)}` for `beta < 1`, `K (1 - u)^{1/(beta-1)}` on `[0, 1]` for
//! `beta > 1`, `K = beta / |1 - beta|`, `lambda = m (2 beta - 1) / |1 - beta|`; exponential at 1.
//! The absolute-first-moment case on the line is the symmetrized half-line density.

use super::{RealLineDensity, RenyiOrder};
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MomentConstraint {
    /// `E[x^2] = sigma^2` on the real line.
    SecondMoment,
    /// `E[x] = m` for `x >= 0`.
    FirstMomentHalfLine,
    /// `E[|x|] = m` on the real line.
    AbsFirstMomentLine,
}

#[derive(Clone, Debug)]
pub struct ExtremalDensity<T> {
    pub constraint: MomentConstraint,
    pub order: RenyiOrder<T>,
    /// `sigma` for the second-moment case, the mean `m` otherwise.
    pub moment: T,
    pub scale: T,
    pub normalization: T,
}

/// Builds the extremal density. For [`MomentConstraint::SecondMoment`] `order` must be at
/// least `1/2`; for the first-moment constraints it must exceed `1/2` (the mean diverges at
/// `1/2`).
pub fn maxent_extremal_density<T: Real>(
    order: RenyiOrder<T>,
    moment: T,
    constraint: MomentConstraint,
) -> Result<ExtremalDensity<T>> {
    if !(moment > T::zero()) {
        return Err(invalid("moment constraint must be positive"));
    }
    let a = order.value();
    let (scale, normalization) = match constraint {
        MomentConstraint::SecondMoment => {
            if a < T::lit(0.5) {
                return Err(Error::InvalidOrder(a.as_f64()));
            }
            match order {
                RenyiOrder::Shannon => (moment, T::one() / (T::TAU()).sqrt()),
                RenyiOrder::Infinite => (moment * T::lit(3.0).sqrt(), T::lit(0.5)),
                RenyiOrder::Finite(a) => {
                    let s = moment * ((T::lit(3.0) * a - T::one()) / (T::one() - a).abs()).sqrt();
                    let af = a.as_f64();
                    let k = if af < 1.0 {
                        let e = 1.0 / (1.0 - af);
                        (ln_gamma(e) - ln_gamma(e - 0.5)).exp() / std::f64::consts::PI.sqrt()
                    } else {
                        let e = af / (af - 1.0);
                        (ln_gamma(e + 0.5) - ln_gamma(e)).exp() / std::f64::consts::PI.sqrt()
                    };
                    (s, T::lit(k))
                }
            }
        }
        MomentConstraint::FirstMomentHalfLine | MomentConstraint::AbsFirstMomentLine => {
            if a <= T::lit(0.5) {
                return Err(Error::InvalidOrder(a.as_f64()));
            }
            match order {
                RenyiOrder::Shannon => (moment, T::one()),
                RenyiOrder::Infinite => (moment + moment, T::one()),
                RenyiOrder::Finite(b) => {
                    let gap = (T::one() - b).abs();
                    (moment * (b + b - T::one()) / gap, b / gap)
                }
            }
        }
    };
    Ok(ExtremalDensity { constraint, order, moment, scale, normalization })
}

impl<T: Real> ExtremalDensity<T> {
    /// Unit-scale profile `p1(u)` on the half line or line.
    fn profile(&self, u: T) -> T {
        let k = self.normalization;
        match self.constraint {
            MomentConstraint::SecondMoment => match self.order {
                RenyiOrder::Shannon => k * (-u * u / T::lit(2.0)).exp(),
                RenyiOrder::Infinite => {
                    if u.abs() <= T::one() {
                        k
                    } else {
                        T::zero()
                    }
                }
                RenyiOrder::Finite(a) if a < T::one() => k * (T::one() + u * u).powf(-T::one() / (T::one() - a)),
                RenyiOrder::Finite(a) => {
                    if u.abs() <= T::one() {
                        k * (T::one() - u * u).powf(T::one() / (a - T::one()))
                    } else {
                        T::zero()
                    }
                }
            },
            MomentConstraint::FirstMomentHalfLine | MomentConstraint::AbsFirstMomentLine => {
                if u < T::zero() {
                    return T::zero();
                }
                match self.order {
                    RenyiOrder::Shannon => (-u).exp(),
                    RenyiOrder::Infinite => {
                        if u <= T::one() {
                            T::one()
                        } else {
                            T::zero()
                        }
                    }
                    RenyiOrder::Finite(b) if b < T::one() => k * (T::one() + u).powf(-T::one() / (T::one() - b)),
                    RenyiOrder::Finite(b) => {
                        if u <= T::one() {
                            k * (T::one() - u).powf(T::one() / (b - T::one()))
                        } else {
                            T::zero()
                        }
                    }
                }
            }
        }
    }

    pub fn pdf(&self, x: T) -> T {
        match self.constraint {
            MomentConstraint::AbsFirstMomentLine => T::lit(0.5) * self.profile(x.abs() / self.scale) / self.scale,
            _ => self.profile(x / self.scale) / self.scale,
        }
    }

    /// Upper end of the support, `inf` for heavy-tailed and Gaussian cases.
    pub fn support_radius(&self) -> T {
        let compact = match self.order {
            RenyiOrder::Infinite => true,
            RenyiOrder::Shannon => false,
            RenyiOrder::Finite(a) => a > T::one(),
        };
        if compact {
            self.scale
        } else {
            T::infinity()
        }
    }

    /// Closed-form entropy of the second-moment extremal density,
    /// `log sigma + log[((3a-1)/|1-a|)^{1/2} (2a/(3a-1))^{1/(1-a)}] - log K`.
    pub fn second_moment_entropy(&self) -> Option<T> {
        if self.constraint != MomentConstraint::SecondMoment {
            return None;
        }
        let sigma = self.moment;
        Some(match self.order {
            RenyiOrder::Shannon => sigma.ln() + T::lit(0.5) * (T::TAU() * T::E()).ln(),
            RenyiOrder::Infinite => (T::lit(2.0) * T::lit(3.0).sqrt() * sigma).ln(),
            RenyiOrder::Finite(a) => {
                let three = T::lit(3.0);
                sigma.ln()
                    + T::lit(0.5) * ((three * a - T::one()) / (T::one() - a).abs()).ln()
                    + ((a + a) / (three * a - T::one())).ln() / (T::one() - a)
                    - self.normalization.ln()
            }
        })
    }

    /// Samples the density on `n` points. Compact supports are covered exactly; otherwise the
    /// window is `[-w, w)` (or `[0, w)` on the half line) with `w = radius * scale`.
    pub fn sample(&self, n: usize, radius: T) -> Result<RealLineDensity<T>> {
        let r = self.support_radius();
        let w = if r.is_finite() { r } else { radius * self.scale };
        let (lo, hi) = match self.constraint {
            MomentConstraint::FirstMomentHalfLine => (T::zero(), w),
            _ => (-w, w),
        };
        let h = (hi - lo) / T::from_usize(n).unwrap();
        let values: Vec<T> = (0..n).map(|i| self.pdf(lo + h * (T::from_usize(i).unwrap() + T::lit(0.5)))).collect();
        let mass: T = values.iter().copied().sum::<T>() * h;
        RealLineDensity::new(lo + h * T::lit(0.5), h, values.into_iter().map(|v| v / mass).collect())
    }
}
