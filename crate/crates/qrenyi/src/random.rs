//! Seeded random states, unitaries and distributions for sweeps and property checks.

use crate::linalg::{inner, vector_norm, Matrix};
use crate::scalar::{Complex, Real};
use crate::spectral::{DensityOperator, HermitianMatrix};
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(T::lit(re), T::lit(im))
}

/// Haar-random unit vector.
pub fn haar_vector<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex<T>> {
    let v: Vec<Complex<T>> = (0..dim).map(|_| gaussian(rng)).collect();
    let n = vector_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

pub fn random_pure_state<T: Real, R: Rng + ?Sized>(labels: Vec<i64>, rng: &mut R) -> DensityOperator<T> {
    let v = haar_vector(labels.len(), rng);
    DensityOperator::pure(&v, labels).expect("normalized vector")
}

/// `W W^dagger / tr` with `W` a `dim x rank` complex Ginibre matrix.
pub fn random_density<T: Real, R: Rng + ?Sized>(labels: Vec<i64>, rank: usize, rng: &mut R) -> DensityOperator<T> {
    let d = labels.len();
    let w = Matrix::from_fn(d, rank.max(1), |_, _| gaussian(rng));
    let m = &w * &w.adjoint();
    let tr = m.trace().re;
    DensityOperator::new(HermitianMatrix::from_hermitian_part(&m.scale(T::one() / tr)), labels)
        .expect("Ginibre state is valid")
}

/// Haar-random unitary by Gram-Schmidt on a Ginibre matrix.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Matrix<T> {
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex<T>> = (0..dim).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let proj = inner(c, &v);
                for (x, y) in v.iter_mut().zip(c) {
                    *x = *x - *y * proj;
                }
            }
        }
        let n = vector_norm(&v);
        if n > T::lit(1e-8) {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    Matrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// Flat Dirichlet sample on the probability simplex.
pub fn random_simplex<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    let e: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| T::lit(x / s)).collect()
}
