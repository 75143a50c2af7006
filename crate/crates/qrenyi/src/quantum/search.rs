//! Infimum of a divergence-type objective over states of a block-diagonal algebra.
//!
//! States are parameterized as `sigma = (+)_k C_k C_k^dagger / t`, `t = sum_k tr C_k C_k^dagger`,
//! with one free complex matrix per block. A single block of full size covers the whole state
//! space. The pulled-back gradient of `f(sigma)` with respect to `C_k` is `2 Gt_k C_k`, where
//! `Gt_k = (G_kk - tr(G sigma)) / t` and `G` is the gradient in `sigma`.

use super::StartReport;
use crate::linalg::{eigh, Eigh, Matrix};
use crate::optimize::{lbfgs, LbfgsOptions};
use crate::scalar::{Complex, Real};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Total number of starts, the structured ones included.
    pub starts: usize,
    pub seed: u64,
    pub lbfgs: LbfgsOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { starts: 8, seed: 0x0a5e, lbfgs: LbfgsOptions::default() }
    }
}

pub(crate) struct BlockFactor {
    sizes: Vec<usize>,
    dim: usize,
}

pub(crate) struct Outcome<T> {
    pub sigma: Matrix<T>,
    pub reports: Vec<StartReport>,
    pub converged: bool,
}

impl BlockFactor {
    pub fn new(sizes: Vec<usize>) -> Self {
        let dim = sizes.iter().sum();
        Self { sizes, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_params(&self) -> usize {
        self.sizes.iter().map(|m| 2 * m * m).sum()
    }

    fn factors<T: Real>(&self, x: &[T]) -> Vec<Matrix<T>> {
        let mut off = 0;
        self.sizes
            .iter()
            .map(|&m| {
                let c = Matrix::from_fn(m, m, |i, j| {
                    let p = off + 2 * (i * m + j);
                    Complex::new(x[p], x[p + 1])
                });
                off += 2 * m * m;
                c
            })
            .collect()
    }

    /// Keeps only the diagonal blocks of `m`.
    pub fn block_diagonal_part<T: Real>(&self, m: &Matrix<T>) -> Matrix<T> {
        let mut out = Matrix::zeros(self.dim, self.dim);
        let mut off = 0;
        for &s in &self.sizes {
            out.set_block(off, off, &m.block(off, off, s, s));
            off += s;
        }
        out
    }

    /// Parameters reproducing the block-diagonal state `sigma` (blockwise square roots).
    pub fn params_for<T: Real>(&self, sigma: &Matrix<T>) -> Vec<T> {
        let mut x = Vec::with_capacity(self.n_params());
        let mut off = 0;
        for &s in &self.sizes {
            let b = sigma.block(off, off, s, s);
            let root = eigh(&b).apply(|v| v.max(T::zero()).sqrt());
            for z in root.as_slice() {
                x.push(z.re);
                x.push(z.im);
            }
            off += s;
        }
        x
    }

    pub fn random_params<T: Real>(&self, rng: &mut ChaCha8Rng) -> Vec<T> {
        (0..self.n_params())
            .map(|_| {
                let v: f64 = StandardNormal.sample(rng);
                T::lit(v)
            })
            .collect()
    }

    pub fn sigma<T: Real>(&self, x: &[T]) -> Matrix<T> {
        let cs = self.factors(x);
        let mut out = Matrix::zeros(self.dim, self.dim);
        let mut off = 0;
        let mut t = T::zero();
        for c in &cs {
            let b = c * &c.adjoint();
            t = t + b.trace().re;
            out.set_block(off, off, &b);
            off += c.rows();
        }
        out.scale(T::one() / t)
    }

    /// Objective value at `x`, writing the parameter gradient into `grad`.
    pub fn value_grad<T: Real>(
        &self,
        x: &[T],
        objective: &dyn Fn(&Eigh<T>) -> Option<(T, Matrix<T>)>,
        grad: &mut [T],
    ) -> T {
        let cs = self.factors(x);
        let bs: Vec<Matrix<T>> = cs.iter().map(|c| c * &c.adjoint()).collect();
        let t: T = bs.iter().map(|b| b.trace().re).sum();
        if !(t > T::zero()) || !t.is_finite() {
            grad.iter_mut().for_each(|g| *g = T::zero());
            return T::infinity();
        }
        let mut values = Vec::with_capacity(self.dim);
        let mut vectors = Matrix::zeros(self.dim, self.dim);
        let mut off = 0;
        for b in &bs {
            let e = eigh(&b.scale(T::one() / t));
            vectors.set_block(off, values.len(), &e.vectors);
            values.extend(e.values);
            off += b.rows();
        }
        let eig = Eigh { values, vectors };
        let Some((value, g)) = objective(&eig) else {
            grad.iter_mut().for_each(|g| *g = T::zero());
            return T::infinity();
        };
        if !value.is_finite() {
            grad.iter_mut().for_each(|g| *g = T::zero());
            return T::infinity();
        }
        let mut off = 0;
        let mut c_tr = T::zero();
        for b in &bs {
            let m = b.rows();
            c_tr = c_tr + g.block(off, off, m, m).trace_product(b).re;
            off += m;
        }
        c_tr = c_tr / t;
        let two = T::lit(2.0);
        let mut off = 0;
        let mut p = 0;
        for c in &cs {
            let m = c.rows();
            let mut gk = g.block(off, off, m, m);
            for i in 0..m {
                gk[(i, i)] = gk[(i, i)] - Complex::new(c_tr, T::zero());
            }
            let d = &gk.scale(T::one() / t) * c;
            for z in d.as_slice() {
                grad[p] = two * z.re;
                grad[p + 1] = two * z.im;
                p += 2;
            }
            off += m;
        }
        value
    }

    /// Runs L-BFGS from each start and keeps the best end point.
    pub fn minimize<T: Real>(
        &self,
        objective: &dyn Fn(&Eigh<T>) -> Option<(T, Matrix<T>)>,
        starts: Vec<(String, Vec<T>)>,
        opts: &crate::optimize::LbfgsOptions,
    ) -> Outcome<T> {
        let mut reports = Vec::with_capacity(starts.len());
        let mut best: Option<(T, Vec<T>, bool)> = None;
        for (provenance, x0) in starts {
            let m = lbfgs(|x: &[T], g: &mut [T]| self.value_grad(x, objective, g), &x0, opts);
            reports.push(StartReport {
                provenance,
                value: m.value.as_f64(),
                iterations: m.iterations,
                evaluations: m.evaluations,
                converged: m.converged,
            });
            if best.as_ref().is_none_or(|b| m.value < b.0) {
                best = Some((m.value, m.point, m.converged));
            }
        }
        let (_, x, converged) = best.expect("at least one start");
        Outcome { sigma: self.sigma(&x), reports, converged }
    }
}

/// `(1 - eps) sigma + eps I / d`.
pub(crate) fn regularize<T: Real>(sigma: &Matrix<T>, eps: T) -> Matrix<T> {
    let d = T::from_usize(sigma.rows()).unwrap();
    &sigma.scale(T::one() - eps) + &Matrix::identity(sigma.rows()).scale(eps / d)
}

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
