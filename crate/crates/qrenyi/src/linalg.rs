//! Dense complex matrices, a cyclic Jacobi eigensolver for Hermitian input, and the
//! spectral functional calculus built on it (including Frechet derivatives through
//! the Daleckii-Krein divided-difference formula).

use crate::scalar::{Complex, Real};
use std::ops::{Add, Index, IndexMut, Mul, Sub};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::new(T::zero(), T::zero()); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Self { rows, cols, data }
    }

    pub fn from_diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex::new(v, T::zero());
        }
        m
    }

    /// `|v><v|`.
    pub fn outer(v: &[Complex<T>]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex<T> {
        self.diagonal().into_iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    pub fn scale(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a * b).collect(),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Self::from_fn(r, c, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    /// Largest `|m_ij - conj(m_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc = acc + self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(Complex::new(T::zero(), T::zero()), |a, (&m, &x)| a + m * x)
            })
            .collect()
    }

    /// Copies the `rows x cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn cast<U: Real>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64()))).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, T: Real> Mul<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let orow = i * rhs.cols;
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let rrow = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[orow + j] = out.data[orow + j] + a * rhs.data[rrow + j];
                }
            }
        }
        out
    }
}

impl<'a, T: Real> Add<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<'a, T: Real> Sub<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Eigh<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

/// Cyclic Jacobi eigensolver. The input is symmetrized first, so only its Hermitian
/// part matters.
pub fn eigh<T: Real>(m: &Matrix<T>) -> Eigh<T> {
    assert!(m.is_square(), "eigh needs a square matrix");
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    if n <= 1 || scale == T::zero() {
        return finish(a, v);
    }
    let eps = T::epsilon();
    let target = (eps * scale) * (eps * scale);
    for _sweep in 0..80 {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + a[(p, q)].norm_sqr();
            }
        }
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= eps * eps * scale {
                    continue;
                }
                let phase_conj = apq.conj() / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (r + r);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let vpp = Complex::new(c, T::zero());
                let vpq = Complex::new(s, T::zero());
                let vqp = phase_conj * (-s);
                let vqq = phase_conj * c;
                rotate(&mut a, &mut v, p, q, [vpp, vpq, vqp, vqq]);
            }
        }
    }
    finish(a, v)
}

#[inline]
fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize, r: [Complex<T>; 4]) {
    let [vpp, vpq, vqp, vqq] = r;
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * vpp + akq * vqp;
        a[(k, q)] = akp * vpq + akq * vqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    let zero = Complex::new(T::zero(), T::zero());
    a[(p, q)] = zero;
    a[(q, p)] = zero;
    a[(p, p)].im = T::zero();
    a[(q, q)].im = T::zero();
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * vpp + vkq * vqp;
        v[(k, q)] = vkp * vpq + vkq * vqq;
    }
}

fn finish<T: Real>(a: Matrix<T>, v: Matrix<T>) -> Eigh<T> {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Eigh { values, vectors }
}

impl<T: Real> Eigh<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `U diag(f(lambda)) U^dagger`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let fv: Vec<T> = self.values.iter().map(|&x| f(x)).collect();
        self.reconstruct_with(&fv)
    }

    pub fn reconstruct_with(&self, fv: &[T]) -> Matrix<T> {
        let n = self.dim();
        let u = &self.vectors;
        let mut out = Matrix::zeros(n, n);
        for k in 0..n {
            let w = fv[k];
            if w == T::zero() {
                continue;
            }
            for i in 0..n {
                let uik = u[(i, k)] * w;
                if uik.re == T::zero() && uik.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + uik * u[(j, k)].conj();
                }
            }
        }
        out
    }

    /// Frechet derivative of the spectral function `f` at the decomposed matrix, applied to
    /// the direction `h`. `df` is the scalar derivative used on (near-)coincident eigenvalues.
    pub fn frechet(&self, f: impl Fn(T) -> T, df: impl Fn(T) -> T, h: &Matrix<T>) -> Matrix<T> {
        let n = self.dim();
        let u = &self.vectors;
        let fv: Vec<T> = self.values.iter().map(|&x| f(x)).collect();
        let scale = self.values.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        let close = T::lit(1e-9) * scale.max(T::min_positive_value());
        let mut hp = &(&u.adjoint() * h) * u;
        for i in 0..n {
            for j in 0..n {
                let (li, lj) = (self.values[i], self.values[j]);
                let g = if (li - lj).abs() <= close {
                    df(T::lit(0.5) * (li + lj))
                } else {
                    (fv[i] - fv[j]) / (li - lj)
                };
                hp[(i, j)] = hp[(i, j)] * g;
            }
        }
        &(u * &hp) * &u.adjoint()
    }
}

/// Euclidean norm of a complex vector.
pub fn vector_norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// `<a|b>`.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * *y)
}
