use super::divergence::{divergence_raw, state_term};
use super::search::{regularize, seeded_rng, BlockFactor, SearchOptions};
use super::StartReport;
use crate::entropy::{renyi_entropy, DiscreteDistribution, RenyiOrder};
use crate::error::{Error, Result};
use crate::linalg::{eigh, Eigh, Matrix};
use crate::scalar::Real;
use crate::spectral::{dephase, fractional_power, DensityOperator, Generator};
use serde::Serialize;

/// Minimum purity accepted by the pure-state duality route.
pub const PURITY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AsymmetryMethod {
    PureDuality,
    NumericInfimum,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymmetryResult<T: Real> {
    pub value: T,
    pub method: AsymmetryMethod,
    pub order: String,
    /// A state commuting with the generator that attains `value`.
    pub minimizer: DensityOperator<T>,
    /// One entry per start for numeric searches, empty for the duality route.
    pub starts: Vec<StartReport>,
    pub converged: bool,
}

fn check_order<T: Real>(order: RenyiOrder<T>) -> Result<()> {
    match order {
        RenyiOrder::Finite(a) if a < T::lit(0.5) => Err(Error::InvalidOrder(a.as_f64())),
        _ => Ok(()),
    }
}

fn check_dim<T: Real>(rho: &DensityOperator<T>, g: &Generator<T>) -> Result<()> {
    if rho.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: rho.dim() });
    }
    Ok(())
}

/// `H_beta` of the eigenspace populations, the value of `A_alpha` on pure states and an upper
/// bound on mixed ones.
pub fn asymmetry_upper_bound<T: Real>(rho: &DensityOperator<T>, g: &Generator<T>, order: RenyiOrder<T>) -> Result<T> {
    check_dim(rho, g)?;
    let beta = order.conjugate()?;
    let pops = DiscreteDistribution::normalized((0..g.decomposition.len() as i64).collect(), g.populations(rho))?;
    Ok(renyi_entropy(&pops, beta))
}

/// `A_1^G(rho) = H(rho_G) - H(rho)`.
pub fn asymmetry_alpha1<T: Real>(rho: &DensityOperator<T>, g: &Generator<T>) -> Result<T> {
    let d = dephase(rho, g)?;
    Ok((d.von_neumann_entropy() - rho.von_neumann_entropy()).max(T::zero()))
}

/// Pure-state asymmetry through the duality `A_alpha(psi) = H_beta(G)`. The minimizer is
/// `psi_G^beta / tr psi_G^beta`.
pub fn asymmetry_pure<T: Real>(psi: &DensityOperator<T>, g: &Generator<T>, order: RenyiOrder<T>) -> Result<AsymmetryResult<T>> {
    check_order(order)?;
    check_dim(psi, g)?;
    let purity = psi.purity();
    if purity < T::one() - T::tol(PURITY_TOL) {
        return Err(Error::NotPure { purity: purity.as_f64() });
    }
    let value = asymmetry_upper_bound(psi, g, order)?;
    let beta = order.conjugate()?;
    let dephased = dephase(psi, g)?;
    let powered = match beta {
        RenyiOrder::Infinite => {
            let e = dephased.matrix().eigh();
            let top = e.values.iter().fold(T::zero(), |m, &v| m.max(v));
            e.apply(|v| if v >= top * (T::one() - T::tol(1e-9)) { T::one() } else { T::zero() })
        }
        _ => fractional_power(dephased.matrix(), beta.value())?.into_matrix(),
    };
    let minimizer = DensityOperator::from_raw(&powered, psi.labels().to_vec());
    Ok(AsymmetryResult {
        value,
        method: AsymmetryMethod::PureDuality,
        order: order.to_string(),
        minimizer,
        starts: Vec::new(),
        converged: true,
    })
}

/// Numeric infimum of `D_alpha(rho || sigma)` over states commuting with `G`.
///
/// The commutant is block diagonal in the eigenbasis of `G`, with one free block per
/// eigenspace. Starts: the regularized dephased state, the maximally mixed state, then seeded
/// random factors, each refined by L-BFGS on the factor parameters. The exactly evaluated
/// dephased state competes as an extra candidate.
pub fn asymmetry_numeric<T: Real>(
    rho: &DensityOperator<T>,
    g: &Generator<T>,
    order: RenyiOrder<T>,
    opts: &SearchOptions,
) -> Result<AsymmetryResult<T>> {
    check_order(order)?;
    check_dim(rho, g)?;
    let w = g.decomposition.block_unitary();
    let rho_r = &(&w.adjoint() * rho.matrix().matrix()) * &w;
    let factor = BlockFactor::new(g.decomposition.multiplicities());
    let dephased_r = factor.block_diagonal_part(&rho_r);
    let d = factor.dim();

    let neg_entropy = -rho.von_neumann_entropy();
    let objective = |eig: &Eigh<T>| -> Option<(T, Matrix<T>)> {
        let (v, grad) = state_term(&rho_r, eig, order)?;
        match order {
            RenyiOrder::Finite(a) => {
                if !(v > T::zero()) {
                    return None;
                }
                let k = a - T::one();
                Some((v.ln() / k, grad.scale(T::one() / (k * v))))
            }
            RenyiOrder::Shannon => Some((neg_entropy + v, grad)),
            RenyiOrder::Infinite => Some((v.ln(), grad.scale(T::one() / v))),
        }
    };

    let mut rng = seeded_rng(opts.seed);
    let mut starts = vec![
        ("dephased".to_string(), factor.params_for(&regularize(&dephased_r, T::lit(1e-3)))),
        ("maximally-mixed".to_string(), factor.params_for(&Matrix::identity(d).scale(T::one() / T::from_usize(d).unwrap()))),
    ];
    for k in 2..opts.starts.max(2) {
        starts.push((format!("random-{}", k - 2), factor.random_params(&mut rng)));
    }
    let out = factor.minimize(&objective, starts, &opts.lbfgs);
    let mut reports = out.reports;

    // A full-rank minimizer is scored with the objective itself: near the boundary the support
    // cut in `divergence_raw` would drop small eigenvalues the optimizer relied on.
    let sigma_eig = eigh(&out.sigma);
    let found = objective(&sigma_eig).map(|(v, _)| v).unwrap_or_else(|| divergence_raw(&rho_r, &sigma_eig, order));
    let exact_dephased = divergence_raw(&rho_r, &eigh(&dephased_r), order);
    reports.push(StartReport {
        provenance: "dephased-exact".to_string(),
        value: exact_dephased.as_f64(),
        iterations: 0,
        evaluations: 1,
        converged: true,
    });
    let (value, sigma_r) = if exact_dephased <= found { (exact_dephased, dephased_r) } else { (found, out.sigma) };
    let sigma = &(&w * &sigma_r) * &w.adjoint();
    Ok(AsymmetryResult {
        value: value.max(T::zero()),
        method: AsymmetryMethod::NumericInfimum,
        order: order.to_string(),
        minimizer: DensityOperator::from_raw(&sigma, rho.labels().to_vec()),
        starts: reports,
        converged: out.converged,
    })
}

/// Duality for (numerically) pure states, numeric infimum otherwise.
pub fn asymmetry<T: Real>(
    rho: &DensityOperator<T>,
    g: &Generator<T>,
    order: RenyiOrder<T>,
    opts: &SearchOptions,
) -> Result<AsymmetryResult<T>> {
    if rho.is_pure(T::tol(PURITY_TOL)) {
        asymmetry_pure(rho, g, order)
    } else {
        asymmetry_numeric(rho, g, order, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn plus_state_has_log_two_asymmetry() {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let psi = DensityOperator::pure_indexed(&[cplx(a, 0.0), cplx(a, 0.0)]).unwrap();
        let g = Generator::number(2);
        for order in [RenyiOrder::half(), RenyiOrder::Shannon, RenyiOrder::Finite(2.0), RenyiOrder::Infinite] {
            let p = asymmetry_pure(&psi, &g, order).unwrap();
            assert!((p.value - 2f64.ln()).abs() < 1e-14);
            let n = asymmetry_numeric(&psi, &g, order, &SearchOptions::default()).unwrap();
            assert!((n.value - 2f64.ln()).abs() < 1e-8, "{order}: {}", n.value);
        }
    }

    #[test]
    fn commuting_state_has_zero_asymmetry() {
        let rho = DensityOperator::<f64>::diagonal(&[0.2, 0.3, 0.5], vec![0, 1, 2]).unwrap();
        let g = Generator::number(3);
        for order in [RenyiOrder::half(), RenyiOrder::Finite(3.0), RenyiOrder::Infinite] {
            let n = asymmetry_numeric(&rho, &g, order, &SearchOptions::default()).unwrap();
            assert!(n.value.abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_input_rejected_by_duality() {
        let rho = DensityOperator::<f64>::maximally_mixed(vec![0, 1]);
        assert!(matches!(asymmetry_pure(&rho, &Generator::number(2), RenyiOrder::Shannon), Err(Error::NotPure { .. })));
    }
}
