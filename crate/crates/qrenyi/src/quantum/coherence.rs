//! Coherence with respect to the eigenbasis of a nondegenerate generator, as Renyi asymmetry:
//! `C_alpha = A_alpha`, `C_g = 1 - e^{-A_{1/2}}`, `C_R = e^{A_inf} - 1`, `C_relent = A_1`.

use super::asymmetry::{asymmetry, asymmetry_alpha1};
use super::search::SearchOptions;
use super::AsymmetryMethod;
use crate::entropy::{renyi_entropy, renyi_length, DiscreteDistribution, RenyiOrder};
use crate::error::{invalid, Error, Result};
use crate::phase::TrigDensity;
use crate::scalar::{Complex, Real};
use crate::spectral::{DensityOperator, Generator};
use serde::Serialize;

/// Grid used for phase-density entropies.
pub const PHASE_GRID: usize = 1 << 14;

#[derive(Clone, Debug, Serialize)]
pub struct CoherenceMeasures<T> {
    /// `(order, C_alpha)` for each requested order.
    pub renyi: Vec<(String, T)>,
    pub geometric: T,
    pub robustness: T,
    pub relative_entropy: T,
    pub method: AsymmetryMethod,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoherenceBounds<T> {
    pub order: String,
    pub conjugate_order: String,
    /// `log 2pi - H_alpha(Phi_zeta | rho)`.
    pub lower: T,
    /// `H_beta(M | rho)`.
    pub upper: T,
    /// `1 - L_{1/2}(Phi_zeta | rho) / 2pi`.
    pub geometric_lower: T,
    /// `1 - max_m rho_mm`.
    pub geometric_upper: T,
    /// `2pi sup_phi p(phi | rho) - 1`.
    pub robustness_lower: T,
    /// `(sum_m rho_mm^{1/2})^2 - 1`.
    pub robustness_upper: T,
    /// `sum_{m,m'} |rho_mm'| - 1`, a weaker comparison bound on `C_R`.
    pub robustness_comparison: T,
    /// `log 2pi - H(Phi_zeta | rho)`, a lower bound on `C_relent`.
    pub relative_entropy_lower: T,
}

fn check_basis<T: Real>(rho: &DensityOperator<T>, basis: &Generator<T>) -> Result<()> {
    if !basis.decomposition.is_nondegenerate() {
        return Err(Error::DegenerateBasis);
    }
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: rho.dim() });
    }
    Ok(())
}

/// Coherence measures of `rho` in the eigenbasis of `basis`. Pure states use the duality
/// closed form, mixed states the numeric infimum.
pub fn coherence_measures<T: Real>(
    rho: &DensityOperator<T>,
    basis: &Generator<T>,
    orders: &[RenyiOrder<T>],
    opts: &SearchOptions,
) -> Result<CoherenceMeasures<T>> {
    check_basis(rho, basis)?;
    let half = asymmetry(rho, basis, RenyiOrder::half(), opts)?;
    let inf = asymmetry(rho, basis, RenyiOrder::Infinite, opts)?;
    let mut renyi = Vec::with_capacity(orders.len());
    for &o in orders {
        renyi.push((o.to_string(), asymmetry(rho, basis, o, opts)?.value));
    }
    Ok(CoherenceMeasures {
        renyi,
        geometric: T::one() - (-half.value).exp(),
        robustness: inf.value.exp() - T::one(),
        relative_entropy: asymmetry_alpha1(rho, basis)?,
        method: half.method,
    })
}

/// Labels `m` of the basis kets, in the order of the generator's eigenspaces: the integer
/// eigenvalues when available, otherwise the eigenspace index.
fn basis_labels<T: Real>(basis: &Generator<T>) -> Vec<i64> {
    let ev = &basis.decomposition.eigenvalues;
    let ints: Option<Vec<i64>> = ev
        .iter()
        .map(|&x| {
            let r = x.round();
            if (x - r).abs() <= T::tol(1e-9) {
                r.to_i64()
            } else {
                None
            }
        })
        .collect();
    ints.unwrap_or_else(|| (0..ev.len() as i64).collect())
}

/// Phase density `p(phi | rho)` of the kets `(2pi)^{-1/2} sum_m e^{i zeta_m} e^{-i m phi} |m>`.
pub fn phase_density<T: Real>(rho: &DensityOperator<T>, basis: &Generator<T>, zeta: Option<&[T]>) -> Result<TrigDensity<T>> {
    check_basis(rho, basis)?;
    let w = basis.decomposition.block_unitary();
    let r = &(&w.adjoint() * rho.matrix().matrix()) * &w;
    TrigDensity::from_state(&r, &basis_labels(basis), zeta)
}

/// Lower and upper bounds on the coherence measures from the phase density and the basis
/// populations.
pub fn coherence_bounds<T: Real>(
    rho: &DensityOperator<T>,
    basis: &Generator<T>,
    zeta: Option<&[T]>,
    order: RenyiOrder<T>,
) -> Result<CoherenceBounds<T>> {
    let beta = order.conjugate()?;
    let density = phase_density(rho, basis, zeta)?;
    let sampled = density.sample(PHASE_GRID, T::zero())?;
    let log_tau = T::TAU().ln();
    let pops = basis.populations(rho);
    let pop_dist = DiscreteDistribution::normalized((0..pops.len() as i64).collect(), pops.clone())?;
    let root_sum: T = pops.iter().map(|p| p.max(T::zero()).sqrt()).sum();
    let max_pop = pops.iter().fold(T::zero(), |m, &p| m.max(p));
    let w = basis.decomposition.block_unitary();
    let r = &(&w.adjoint() * rho.matrix().matrix()) * &w;
    let abs_sum: T = r.as_slice().iter().map(|z: &Complex<T>| z.norm()).sum();
    Ok(CoherenceBounds {
        order: order.to_string(),
        conjugate_order: beta.to_string(),
        lower: log_tau - renyi_entropy(&sampled, order),
        upper: renyi_entropy(&pop_dist, beta),
        geometric_lower: T::one() - renyi_length(&sampled, RenyiOrder::half()) / T::TAU(),
        geometric_upper: T::one() - max_pop,
        robustness_lower: T::TAU() * density.sup(PHASE_GRID).0 - T::one(),
        robustness_upper: root_sum * root_sum - T::one(),
        robustness_comparison: abs_sum - T::one(),
        relative_entropy_lower: log_tau - renyi_entropy(&sampled, RenyiOrder::Shannon),
    })
}

/// Coherent phase state `(1 - |v|^2)^{1/2} sum_n v^n |n>` truncated where the discarded weight
/// `|v|^{2 n_c}` falls below `tail`, renormalized. Labels are photon numbers.
pub fn coherent_phase_state<T: Real>(v: Complex<T>, tail: T) -> Result<DensityOperator<T>> {
    let r = v.norm();
    if !(r < T::one()) {
        return Err(invalid("coherent phase states need |v| < 1"));
    }
    if !(tail > T::zero() && tail < T::one()) {
        return Err(invalid("tail weight must lie in (0, 1)"));
    }
    let cutoff = if r > T::zero() { (tail.ln() / (T::lit(2.0) * r.ln())).ceil().to_usize().unwrap_or(1).max(1) } else { 1 };
    let norm = (T::one() - r * r).sqrt();
    let mut amp = Vec::with_capacity(cutoff);
    let mut z = Complex::new(norm, T::zero());
    for _ in 0..cutoff {
        amp.push(z);
        z = z * v;
    }
    let total = crate::linalg::vector_norm(&amp);
    let amp: Vec<Complex<T>> = amp.into_iter().map(|a| a / total).collect();
    DensityOperator::pure(&amp, (0..cutoff as i64).collect())
}

/// Robustness of coherence of a pure state from its populations, `(sum sqrt p)^2 - 1`.
fn pure_robustness<T: Real>(psi: &DensityOperator<T>) -> T {
    let s: T = psi.populations().iter().map(|p| p.max(T::zero()).sqrt()).sum();
    s * s - T::one()
}

/// `C_R` of a coherent phase state, doubling the cutoff until the value moves by less than
/// `stability`. Returns the value and the final cutoff.
pub fn coherent_phase_robustness<T: Real>(v: Complex<T>, stability: T) -> Result<(T, usize)> {
    let mut tail = T::lit(1e-10);
    let psi = coherent_phase_state(v, tail)?;
    let mut value = pure_robustness(&psi);
    let mut cutoff = psi.dim();
    for _ in 0..8 {
        // Squaring the tail weight doubles the cutoff.
        tail = tail * tail;
        if tail < T::min_positive_value() {
            break;
        }
        let next = coherent_phase_state(v, tail)?;
        let nv = pure_robustness(&next);
        let delta = (nv - value).abs();
        value = nv;
        cutoff = next.dim();
        if delta < stability {
            return Ok((value, cutoff));
        }
    }
    log::warn!("coherent phase robustness not stable to {} after cutoff {cutoff}", stability.as_f64());
    Ok((value, cutoff))
}
