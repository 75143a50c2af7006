//! The scaling function `f(alpha)` of the Heisenberg-type bounds.
//!
//! For `1/2 <= alpha < 1`
//! `f = 2/alpha (pi/(3a-1))^{1/2} ((3a-1)/2)^{1/(1-a)} (1-a)^{1/2} G(1/(1-a)) / G(1/(1-a) - 1/2)`,
//! for `alpha > 1` the last three factors become `(a-1)^{1/2} G(a/(a-1) + 1/2) / G(a/(a-1))`,
//! and `f(1) = (2 pi / e^3)^{1/2}`.

use crate::entropy::RenyiOrder;
use crate::error::{Error, Result};
use crate::phase::golden_max;
use statrs::function::gamma::{gamma, ln_gamma};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Search interval for the maximum of `f`.
const SEARCH: (f64, f64) = (0.5, 3.0);

fn check(order: RenyiOrder<f64>) -> Result<()> {
    match order {
        RenyiOrder::Finite(a) if a < 0.5 => Err(Error::InvalidOrder(a)),
        _ => Ok(()),
    }
}

/// `log f(alpha)` for finite `alpha != 1`.
fn ln_f(a: f64) -> f64 {
    if (a - 1.0).abs() < 1e-12 {
        return 0.5 * (2.0 * PI).ln() - 1.5;
    }
    let common = 2f64.ln() - a.ln() + 0.5 * (PI.ln() - (3.0 * a - 1.0).ln()) + (1.5 * (a - 1.0)).ln_1p() / (1.0 - a);
    if a < 1.0 {
        let x = 1.0 / (1.0 - a);
        common + 0.5 * (1.0 - a).ln() + ln_gamma(x) - ln_gamma(x - 0.5)
    } else {
        let y = a / (a - 1.0);
        common + 0.5 * (a - 1.0).ln() + ln_gamma(y + 0.5) - ln_gamma(y)
    }
}

/// `f` when `1/(1-alpha)` or `alpha/(alpha-1)` is a small integer: the gamma ratio is then
/// `pi^{1/2}` times a rational product, and the `pi^{1/2}` cancels against the prefactor.
fn rational_f(a: f64) -> Option<f64> {
    let b = 3.0 * a - 1.0;
    let whole = |v: f64| (v.fract() == 0.0 && (1.0..=64.0).contains(&v)).then_some(v as i32);
    if a < 1.0 {
        let x = whole(1.0 / (1.0 - a))?;
        let r: f64 = (1..x).map(|k| k as f64 / (k as f64 - 0.5)).product();
        Some(2.0 / a * ((1.0 - a) / b).sqrt() * (0.5 * b).powi(x) * r)
    } else {
        let y = whole(a / (a - 1.0))?;
        let s: f64 = (1..=y).map(|k| k as f64 - 0.5).product::<f64>() / (1..y).map(f64::from).product::<f64>();
        Some(2.0 / a * PI * ((a - 1.0) / b).sqrt() * (0.5 * b).powi(1 - y) * s)
    }
}

/// Direct product form, accurate to a few ulp away from `alpha = 1`.
fn direct_f(a: f64) -> f64 {
    if let Some(v) = rational_f(a) {
        return v;
    }
    let b = 3.0 * a - 1.0;
    let head = 2.0 / a * (PI / b).sqrt() * (0.5 * b).powf(1.0 / (1.0 - a));
    if a < 1.0 {
        let x = 1.0 / (1.0 - a);
        head * (1.0 - a).sqrt() * gamma(x) / gamma(x - 0.5)
    } else {
        let y = a / (a - 1.0);
        head * (a - 1.0).sqrt() * gamma(y + 0.5) / gamma(y)
    }
}

/// `f(alpha)`; zero at `alpha = inf`.
pub fn scaling_function_f(order: RenyiOrder<f64>) -> Result<f64> {
    check(order)?;
    Ok(match order {
        RenyiOrder::Shannon => (2.0 * PI / 1f64.exp().powi(3)).sqrt(),
        RenyiOrder::Infinite => 0.0,
        RenyiOrder::Finite(a) if (a - 1.0).abs() > 0.01 && a < 100.0 => direct_f(a),
        RenyiOrder::Finite(a) => ln_f(a).exp(),
    })
}

/// `alpha^{alpha/(alpha-1)} f(alpha)`, the constant in the length-deviation and RMSE bounds.
/// Equals `1` at `1/2`, `(2 pi / e)^{1/2}` at `1` and `pi/3^{1/2}` at `inf`.
pub fn heisenberg_constant(order: RenyiOrder<f64>) -> Result<f64> {
    check(order)?;
    Ok(match order {
        RenyiOrder::Shannon => (2.0 * PI / 1f64.exp()).sqrt(),
        RenyiOrder::Infinite => PI / 3f64.sqrt(),
        RenyiOrder::Finite(a) if (a - 1.0).abs() < 1e-12 => (2.0 * PI / 1f64.exp()).sqrt(),
        RenyiOrder::Finite(a) => match rational_f(a) {
            Some(f) => a.powf(a / (a - 1.0)) * f,
            None => (a * a.ln() / (a - 1.0) + ln_f(a)).exp(),
        },
    })
}

/// `(alpha*, f(alpha*))` by golden section on `[1/2, 3]`.
pub fn maximize_scaling_function() -> (f64, f64) {
    let f = |a: f64| scaling_function_f(RenyiOrder::Finite(a)).unwrap_or(0.0);
    golden_max(f, SEARCH.0, SEARCH.1, 200)
}

/// `f_max`, computed once.
pub fn f_max() -> f64 {
    static CELL: OnceLock<(f64, f64)> = OnceLock::new();
    CELL.get_or_init(maximize_scaling_function).1
}
