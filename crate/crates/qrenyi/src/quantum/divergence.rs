//! Sandwiched Renyi divergence
//! `D_alpha(rho || sigma) = log tr[(sigma^g rho sigma^g)^alpha] / (alpha - 1)`, `g = (1-alpha)/(2 alpha)`,
//! with the Umegaki and max-relative-entropy limits, plus the matrix gradients in `sigma`
//! used by the infimum searches.

use crate::entropy::RenyiOrder;
use crate::error::{Error, Result};
use crate::linalg::{eigh, Eigh, Matrix};
use crate::scalar::Real;
use crate::spectral::{DensityOperator, SUPPORT_TOL};

/// Mass of `rho` outside the support of `sigma`, above which the divergence counts as
/// unsupported.
const LEAK_TOL: f64 = 1e-10;

/// `tr[(1 - Pi_sigma) rho]`.
fn leaked_mass<T: Real>(rho: &Matrix<T>, sigma: &Eigh<T>) -> T {
    let support = T::tol(SUPPORT_TOL);
    let u = &sigma.vectors;
    let mut leak = T::zero();
    for k in 0..sigma.dim() {
        if sigma.values[k] > support {
            continue;
        }
        let v = u.column(k);
        let rv = rho.mul_vec(&v);
        leak = leak + crate::linalg::inner(&v, &rv).re;
    }
    leak.max(T::zero())
}

fn power_on_support<T: Real>(e: &Eigh<T>, p: T) -> Matrix<T> {
    let support = T::tol(SUPPORT_TOL);
    e.apply(|x| if x > support { x.powf(p) } else { T::zero() })
}

/// Sandwiched Renyi divergence in nats.
///
/// Unsupported mass (`supp rho` not inside `supp sigma`) gives `+inf` for `alpha >= 1`; for
/// `alpha < 1` the value is computed on the intersection of the supports. Orders below
/// `1/2` are evaluated but logged as outside the data-processing range.
pub fn sandwiched_relative_entropy<T: Real>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    order: RenyiOrder<T>,
) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    if let RenyiOrder::Finite(a) = order {
        if a < T::lit(0.5) {
            log::warn!("sandwiched divergence at order {a} < 1/2 does not satisfy data processing");
        }
    }
    Ok(divergence_raw(rho.matrix().matrix(), &sigma.matrix().eigh(), order))
}

/// Relative cut below which eigenvalues of `rho` count as rounding noise.
const RANK_TOL: f64 = 1e-14;

/// `B^dagger s2 B` with `rho = B B^dagger` over the numerical support of `rho`. Its spectrum is
/// the nonzero spectrum of `s rho s`, without the `O(eps)` eigenvalues a rank-deficient `rho`
/// leaves behind, which `v^alpha` would amplify for `alpha < 1`.
fn support_compression<T: Real>(rho: &Matrix<T>, s2: &Matrix<T>) -> Matrix<T> {
    let er = eigh(rho);
    let top = er.values.iter().fold(T::zero(), |m, &v| m.max(v));
    let cut = top * T::tol(RANK_TOL);
    let keep: Vec<usize> = (0..er.dim()).filter(|&k| er.values[k] > cut).collect();
    let b = Matrix::from_fn(rho.rows(), keep.len(), |i, j| er.vectors[(i, keep[j])] * er.values[keep[j]].sqrt());
    &(&b.adjoint() * s2) * &b
}

pub(crate) fn divergence_raw<T: Real>(rho: &Matrix<T>, sigma: &Eigh<T>, order: RenyiOrder<T>) -> T {
    let supported = leaked_mass(rho, sigma) <= T::tol(LEAK_TOL);
    match order {
        RenyiOrder::Shannon => {
            if !supported {
                return T::infinity();
            }
            let er = eigh(rho);
            let neg_entropy: T =
                er.values.iter().filter(|&&x| x > T::zero()).map(|&x| x * x.ln()).sum();
            let support = T::tol(SUPPORT_TOL);
            let log_sigma = sigma.apply(|x| if x > support { x.ln() } else { T::zero() });
            neg_entropy - rho.trace_product(&log_sigma).re
        }
        RenyiOrder::Infinite => {
            if !supported {
                return T::infinity();
            }
            let s = power_on_support(sigma, T::lit(-0.5));
            let z = &(&s * rho) * &s;
            let top = eigh(&z).values.last().copied().unwrap_or(T::zero());
            top.ln()
        }
        RenyiOrder::Finite(a) => {
            if a > T::one() && !supported {
                return T::infinity();
            }
            let g = (T::one() - a) / (a + a);
            let s2 = power_on_support(sigma, g + g);
            let x = support_compression(rho, &s2);
            let q: T = eigh(&x).values.iter().filter(|&&v| v > T::zero()).map(|&v| v.powf(a)).sum();
            if !(q > T::zero()) {
                return T::infinity();
            }
            q.ln() / (a - T::one())
        }
    }
}

/// Per-state term of the objective and its gradient in `sigma`, at a full-rank `sigma`:
/// finite orders give `Q = tr[(sigma^g rho sigma^g)^alpha]`, order 1 gives `-tr[rho log sigma]`,
/// order infinity gives `lambda_max(sigma^{-1/2} rho sigma^{-1/2})`.
/// Returns `None` when `sigma` is singular.
pub(crate) fn state_term<T: Real>(rho: &Matrix<T>, sigma: &Eigh<T>, order: RenyiOrder<T>) -> Option<(T, Matrix<T>)> {
    if sigma.values.iter().any(|&v| !(v > T::zero())) {
        return None;
    }
    match order {
        RenyiOrder::Shannon => {
            let log_sigma = sigma.apply(|x| x.ln());
            let value = -rho.trace_product(&log_sigma).re;
            let grad = sigma.frechet(|x| x.ln(), |x| T::one() / x, rho).scale(-T::one());
            Some((value, grad))
        }
        RenyiOrder::Infinite => {
            let mh = T::lit(-0.5);
            let s = sigma.apply(|x| x.powf(mh));
            let z = &(&s * rho) * &s;
            let ez = eigh(&z);
            let n = ez.dim();
            let lam = ez.values[n - 1];
            let v = ez.vectors.column(n - 1);
            let vv = Matrix::outer(&v);
            let m = &(rho * &s) * &vv;
            let y = &m + &m.adjoint();
            let grad = sigma.frechet(|x| x.powf(mh), |x| mh * x.powf(mh - T::one()), &y);
            Some((lam, grad))
        }
        RenyiOrder::Finite(a) => {
            let g = (T::one() - a) / (a + a);
            let s = sigma.apply(|x| x.powf(g));
            let x = &(&s * rho) * &s;
            let ex = eigh(&x);
            let top = ex.values.iter().fold(T::zero(), |m, &v| m.max(v));
            let cut = top * T::tol(1e-13);
            let q: T = ex.values.iter().filter(|&&v| v > cut).map(|&v| v.powf(a)).sum();
            let p = ex.apply(|v| if v > cut { a * v.powf(a - T::one()) } else { T::zero() });
            let m = &(rho * &s) * &p;
            let y = &m + &m.adjoint();
            let grad = sigma.frechet(|x| x.powf(g), |x| g * x.powf(g - T::one()), &y);
            Some((q, grad))
        }
    }
}
