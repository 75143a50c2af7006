//! Phase estimation POVMs on a truncated basis with integer labels.

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::random::haar_unitary;
use crate::scalar::{expi, Complex};
use crate::spectral::{DensityOperator, Generator};
use crate::entropy::CircularDensity;
use crate::phase::TrigDensity;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::TAU;

/// Largest tolerated `max |sum_i M_i - 1|`.
pub const COMPLETENESS_TOL: f64 = 1e-8;

/// Integer eigenvalues of a diagonal generator, in basis order.
pub fn integer_labels(g: &Generator<f64>) -> Result<Vec<i64>> {
    g.integer_values().ok_or_else(|| Error::NotPeriodic("phase estimation needs a diagonal generator with integer eigenvalues".into()))
}

/// Grid-sampled canonical phase POVM with effects `(2pi/n) |phi_i><phi_i|`, `phi_i = 2pi i/n` and
/// `|phi> = (2pi)^{-1/2} sum_m e^{i zeta_m} e^{-i m phi} |m>`.
#[derive(Clone, Debug, Serialize)]
pub struct PhasePovm {
    pub grid_size: usize,
    pub labels: Vec<i64>,
    pub reference_phases: Vec<f64>,
}

impl PhasePovm {
    pub fn new(basis: &Generator<f64>, grid_size: usize, reference_phases: Option<Vec<f64>>) -> Result<Self> {
        Self::from_labels(integer_labels(basis)?, grid_size, reference_phases)
    }

    pub fn from_labels(labels: Vec<i64>, grid_size: usize, reference_phases: Option<Vec<f64>>) -> Result<Self> {
        let zeta = reference_phases.unwrap_or_else(|| vec![0.0; labels.len()]);
        if zeta.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: labels.len(), found: zeta.len() });
        }
        if grid_size == 0 {
            return Err(invalid("grid size must be positive"));
        }
        let povm = Self { grid_size, labels, reference_phases: zeta };
        let defect = povm.completeness_defect();
        if defect > COMPLETENESS_TOL {
            return Err(Error::IncompletePovm { defect });
        }
        Ok(povm)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn angle(&self, i: usize) -> f64 {
        TAU * i as f64 / self.grid_size as f64
    }

    /// `|phi>` scaled by `(2pi)^{1/2}`.
    fn unnormalized_ket(&self, phi: f64) -> Vec<Complex<f64>> {
        self.labels.iter().zip(&self.reference_phases).map(|(&m, &z)| expi(z - m as f64 * phi)).collect()
    }

    pub fn effect(&self, i: usize) -> Matrix<f64> {
        Matrix::outer(&self.unnormalized_ket(self.angle(i))).scale(1.0 / self.grid_size as f64)
    }

    /// `max |sum_i M_i - 1|`, in closed form: off-diagonal sums vanish unless the grid size
    /// divides a label difference.
    pub fn completeness_defect(&self) -> f64 {
        let n = self.grid_size as i64;
        let mut worst: f64 = 0.0;
        for (a, &la) in self.labels.iter().enumerate() {
            for (b, &lb) in self.labels.iter().enumerate() {
                if a != b && (la - lb).rem_euclid(n) == 0 {
                    worst = worst.max(1.0);
                }
            }
        }
        worst
    }

    /// Exact density `<phi|rho|phi>` as a trigonometric polynomial.
    pub fn density(&self, rho: &DensityOperator<f64>) -> Result<TrigDensity<f64>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: rho.dim() });
        }
        TrigDensity::from_state(rho.matrix().matrix(), &self.labels, Some(&self.reference_phases))
    }

    /// `(angle, effect)` pairs.
    pub fn effects(&self) -> Vec<EstimatorEffect> {
        (0..self.grid_size).map(|i| EstimatorEffect { angle: self.angle(i), effect: self.effect(i) }).collect()
    }
}

/// Canonical phase density sampled on the POVM grid `phi_i = 2pi i/n`.
pub fn canonical_phase_density(rho: &DensityOperator<f64>, povm: &PhasePovm) -> Result<CircularDensity<f64>> {
    povm.density(rho)?.sample(povm.grid_size, 0.0)
}

#[derive(Clone, Debug)]
pub struct EstimatorEffect {
    pub angle: f64,
    pub effect: Matrix<f64>,
}

/// Estimate-valued POVM. The canonical variant is treated as the continuous covariant
/// measurement; other estimators are finite lists of labelled effects.
#[derive(Clone, Debug)]
pub enum Estimator {
    Canonical(PhasePovm),
    Effects(Vec<EstimatorEffect>),
}

impl Estimator {
    /// Always reports `angle` (a single identity effect).
    pub fn constant(angle: f64, dim: usize) -> Self {
        Self::Effects(vec![EstimatorEffect { angle, effect: Matrix::identity(dim) }])
    }

    /// Projective measurement onto the columns of `basis`, outcome `j` reporting `angles[j]`.
    pub fn projective(basis: &Matrix<f64>, angles: &[f64]) -> Result<Self> {
        if basis.cols() != angles.len() {
            return Err(Error::DimensionMismatch { expected: basis.cols(), found: angles.len() });
        }
        Ok(Self::Effects(
            angles.iter().enumerate().map(|(j, &angle)| EstimatorEffect { angle, effect: Matrix::outer(&basis.column(j)) }).collect(),
        ))
    }

    /// `U M_i U^dagger` for each effect.
    pub fn rotated(&self, u: &Matrix<f64>) -> Self {
        let effects = self.effects();
        Self::Effects(
            effects
                .into_iter()
                .map(|e| EstimatorEffect { angle: e.angle, effect: &(u * &e.effect) * &u.adjoint() })
                .collect(),
        )
    }

    /// Canonical grid POVM rotated by a Haar-random unitary.
    pub fn random_rotation<R: Rng + ?Sized>(povm: &PhasePovm, rng: &mut R) -> Self {
        let u = haar_unitary(povm.dim(), rng);
        Self::Canonical(povm.clone()).rotated(&u)
    }

    /// Relabels every outcome by `map`; effects reporting the same angle are not merged.
    pub fn relabeled(&self, map: impl Fn(f64) -> f64) -> Self {
        Self::Effects(self.effects().into_iter().map(|e| EstimatorEffect { angle: map(e.angle), effect: e.effect }).collect())
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Canonical(p) => p.dim(),
            Self::Effects(e) => e.first().map_or(0, |x| x.effect.rows()),
        }
    }

    pub fn effects(&self) -> Vec<EstimatorEffect> {
        match self {
            Self::Canonical(p) => p.effects(),
            Self::Effects(e) => e.clone(),
        }
    }

    pub fn completeness_defect(&self) -> f64 {
        match self {
            Self::Canonical(p) => p.completeness_defect(),
            Self::Effects(e) => {
                let d = self.dim();
                let mut sum = Matrix::zeros(d, d);
                for x in e {
                    sum = &sum + &x.effect;
                }
                (&sum - &Matrix::identity(d)).max_abs()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn canonical_povm_is_complete() {
        let g = Generator::number(6);
        let p = PhasePovm::new(&g, 16, None).unwrap();
        let e = Estimator::Canonical(p.clone());
        assert!(e.completeness_defect() < 1e-12);
        assert!(PhasePovm::new(&g, 5, None).is_err());
    }

    #[test]
    fn number_state_density_is_uniform() {
        let g = Generator::number(4);
        let p = PhasePovm::new(&g, 64, None).unwrap();
        let rho = DensityOperator::<f64>::basis_state(2, vec![0, 1, 2, 3]);
        let d = canonical_phase_density(&rho, &p).unwrap();
        assert!((d.max_value() - 1.0 / (2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn rotated_povm_stays_complete() {
        let g = Generator::number(5);
        let p = PhasePovm::new(&g, 12, None).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(7);
        let e = Estimator::random_rotation(&p, &mut rng);
        assert!(e.completeness_defect() < 1e-12);
    }
}
