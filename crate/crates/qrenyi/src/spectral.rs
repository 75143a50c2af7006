//! Hermitian operators, density operators, generators and their spectral operations.
//!
//! | operation | result |
//! |---|---|
//! | `eigendecompose(H)` | `H = sum_k lambda_k P_k`, eigenvalues ascending |
//! | `fractional_power(rho, a)` | `rho^a` on the support, zero elsewhere |
//! | `dephase(rho, G)` | `sum_k P_k rho P_k` |
//! | `displace(rho, G, x)` | `e^{-ixG} rho e^{ixG}` |
//! | `purify(rho)` | `sum_i sqrt(w_i) |v_i>|i>` |
//! | `partial_trace(rho, keep, dims)` | reduced operator on `keep` |

use crate::error::{invalid, Error, Result};
use crate::linalg::{eigh, Eigh, Matrix};
use crate::scalar::{expi, Complex, Real};
use serde::{Deserialize, Serialize};

pub(crate) const HERMITIAN_TOL: f64 = 1e-12;
pub(crate) const POSITIVITY_TOL: f64 = 1e-10;
pub(crate) const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues at or below this count as outside the support.
pub(crate) const SUPPORT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    inner: Matrix<T>,
}

impl<T: Real> HermitianMatrix<T> {
    /// Validates Hermiticity entrywise, then stores the exact Hermitian part.
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        let scale = T::one().max(m.max_abs());
        let defect = m.hermiticity_defect();
        if defect > T::tol(HERMITIAN_TOL) * scale {
            return Err(Error::NotHermitian { deviation: defect.as_f64() });
        }
        Ok(Self { inner: m.hermitian_part() })
    }

    /// Takes the Hermitian part without checking how far the input was from it.
    pub fn from_hermitian_part(m: &Matrix<T>) -> Self {
        Self { inner: m.hermitian_part() }
    }

    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(invalid("rows of a Hermitian matrix must all have the matrix dimension"));
        }
        Self::new(Matrix::from_vec(n, n, rows.into_iter().flatten().collect()))
    }

    pub fn diagonal(values: &[T]) -> Self {
        Self { inner: Matrix::from_diagonal(values) }
    }

    pub fn identity(n: usize) -> Self {
        Self { inner: Matrix::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.inner
    }

    pub fn eigh(&self) -> Eigh<T> {
        eigh(&self.inner)
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.eigh().values
    }

    pub fn trace(&self) -> T {
        self.inner.trace().re
    }

    /// `tr(self * other)`, real for Hermitian operands.
    pub fn expectation(&self, other: &HermitianMatrix<T>) -> T {
        self.inner.trace_product(&other.inner).re
    }

    pub fn cast<U: Real>(&self) -> HermitianMatrix<U> {
        HermitianMatrix { inner: self.inner.cast() }
    }
}

/// `H = sum_k lambda_k P_k` with distinct eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T> {
    pub eigenvalues: Vec<T>,
    pub projectors: Vec<HermitianMatrix<T>>,
    /// Orthonormal basis of each eigenspace, one column per vector.
    pub bases: Vec<Matrix<T>>,
    pub degeneracy_tolerance: T,
}

impl<T: Real> SpectralDecomposition<T> {
    fn from_groups(values: &[T], vectors: &Matrix<T>, tol: T) -> Self {
        let n = values.len();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            match groups.last_mut() {
                Some(g) if (values[i] - values[*g.last().unwrap()]).abs() <= tol => g.push(i),
                _ => groups.push(vec![i]),
            }
        }
        let mut eigenvalues = Vec::with_capacity(groups.len());
        let mut projectors = Vec::with_capacity(groups.len());
        let mut bases = Vec::with_capacity(groups.len());
        for g in groups {
            let mean = g.iter().map(|&i| values[i]).sum::<T>() / T::from_usize(g.len()).unwrap();
            let basis = Matrix::from_fn(n, g.len(), |r, c| vectors[(r, g[c])]);
            let p = &basis * &basis.adjoint();
            eigenvalues.push(mean);
            projectors.push(HermitianMatrix::from_hermitian_part(&p));
            bases.push(basis);
        }
        Self { eigenvalues, projectors, bases, degeneracy_tolerance: tol }
    }

    /// Decomposition of a matrix that is diagonal in the computational basis. Equal
    /// diagonal entries (within `tol`) share an eigenspace spanned by basis vectors.
    pub fn from_diagonal(values: &[T], tol: T) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let sorted: Vec<T> = order.iter().map(|&i| values[i]).collect();
        let perm = Matrix::from_fn(n, n, |r, c| {
            if r == order[c] {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        });
        Self::from_groups(&sorted, &perm, tol)
    }

    pub fn dim(&self) -> usize {
        self.bases.first().map_or(0, |b| b.rows())
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.cols()).collect()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.bases.iter().all(|b| b.cols() == 1)
    }

    /// `sum_k f(lambda_k) P_k`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> HermitianMatrix<T> {
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for (lam, p) in self.eigenvalues.iter().zip(&self.projectors) {
            out = &out + &p.matrix().scale(f(*lam));
        }
        HermitianMatrix::from_hermitian_part(&out)
    }

    pub fn reconstruct(&self) -> HermitianMatrix<T> {
        self.apply(|x| x)
    }

    /// `tr(P_k rho)` for each eigenspace.
    pub fn populations(&self, rho: &DensityOperator<T>) -> Vec<T> {
        self.bases
            .iter()
            .map(|b| {
                let block = &(&b.adjoint() * rho.matrix().matrix()) * b;
                block.trace().re.max(T::zero())
            })
            .collect()
    }

    /// The unitary `[V_1 V_2 ...]` whose columns run through the eigenspace bases in order.
    pub fn block_unitary(&self) -> Matrix<T> {
        let n = self.dim();
        let mut u = Matrix::zeros(n, n);
        let mut c0 = 0;
        for b in &self.bases {
            u.set_block(0, c0, b);
            c0 += b.cols();
        }
        u
    }
}

/// Default grouping tolerance `1e-9 * max |lambda|`.
pub fn default_degeneracy_tolerance<T: Real>(values: &[T]) -> T {
    let scale = values.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    T::tol(1e-9) * scale.max(T::lit(1e-3))
}

pub fn eigendecompose<T: Real>(m: &HermitianMatrix<T>, degeneracy_tol: Option<T>) -> SpectralDecomposition<T> {
    let e = m.eigh();
    let tol = degeneracy_tol.unwrap_or_else(|| default_degeneracy_tolerance(&e.values));
    SpectralDecomposition::from_groups(&e.values, &e.vectors, tol)
}

/// `m^exponent` via the eigendecomposition. Eigenvalues at or below `1e-12` are treated as
/// outside the support and map to zero, so negative exponents give the pseudo-inverse power.
pub fn fractional_power<T: Real>(m: &HermitianMatrix<T>, exponent: T) -> Result<HermitianMatrix<T>> {
    let e = m.eigh();
    check_positive(&e.values)?;
    let support = T::tol(SUPPORT_TOL);
    Ok(HermitianMatrix::from_hermitian_part(&e.apply(|x| if x > support { x.powf(exponent) } else { T::zero() })))
}

pub(crate) fn check_positive<T: Real>(values: &[T]) -> Result<()> {
    match values.first() {
        Some(&v) if v < -T::tol(POSITIVITY_TOL) => Err(Error::NotPositive { eigenvalue: v.as_f64() }),
        _ => Ok(()),
    }
}

/// A density operator together with the integer label of each basis vector
/// (photon number, magnetic quantum number, energy index).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator<T> {
    matrix: HermitianMatrix<T>,
    labels: Vec<i64>,
}

impl<T: Real> DensityOperator<T> {
    pub fn new(matrix: HermitianMatrix<T>, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != matrix.dim() {
            return Err(Error::DimensionMismatch { expected: matrix.dim(), found: labels.len() });
        }
        let tr = matrix.trace();
        if (tr - T::one()).abs() > T::tol(TRACE_TOL) {
            return Err(Error::TraceNotOne { trace: tr.as_f64() });
        }
        check_positive(&matrix.eigenvalues())?;
        Ok(Self { matrix, labels })
    }

    /// Builds from a Hermitian matrix, labelling the basis `0..dim`.
    pub fn from_matrix(matrix: HermitianMatrix<T>) -> Result<Self> {
        let labels = (0..matrix.dim() as i64).collect();
        Self::new(matrix, labels)
    }

    /// Renormalizes `(m + m^dagger)/2` to unit trace without re-validating positivity.
    pub(crate) fn from_raw(m: &Matrix<T>, labels: Vec<i64>) -> Self {
        let h = m.hermitian_part();
        let tr = h.trace().re;
        Self { matrix: HermitianMatrix::from_hermitian_part(&h.scale(T::one() / tr)), labels }
    }

    /// `|psi><psi|` after normalizing `amplitudes`.
    pub fn pure(amplitudes: &[Complex<T>], labels: Vec<i64>) -> Result<Self> {
        let norm = crate::linalg::vector_norm(amplitudes);
        if norm == T::zero() || !norm.is_finite() {
            return Err(invalid("state vector has zero or non-finite norm"));
        }
        let v: Vec<Complex<T>> = amplitudes.iter().map(|z| z / norm).collect();
        if labels.len() != v.len() {
            return Err(Error::DimensionMismatch { expected: v.len(), found: labels.len() });
        }
        Ok(Self { matrix: HermitianMatrix::from_hermitian_part(&Matrix::outer(&v)), labels })
    }

    pub fn pure_indexed(amplitudes: &[Complex<T>]) -> Result<Self> {
        Self::pure(amplitudes, (0..amplitudes.len() as i64).collect())
    }

    pub fn diagonal(probabilities: &[T], labels: Vec<i64>) -> Result<Self> {
        Self::new(HermitianMatrix::diagonal(probabilities), labels)
    }

    pub fn maximally_mixed(labels: Vec<i64>) -> Self {
        let d = labels.len();
        let p = T::one() / T::from_usize(d).unwrap();
        Self { matrix: HermitianMatrix::diagonal(&vec![p; d]), labels }
    }

    pub fn basis_state(index: usize, labels: Vec<i64>) -> Self {
        let mut probs = vec![T::zero(); labels.len()];
        probs[index] = T::one();
        Self { matrix: HermitianMatrix::diagonal(&probs), labels }
    }

    /// Convex combination; weights must be nonnegative and sum to one.
    pub fn mixture(parts: &[(T, &DensityOperator<T>)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| invalid("empty mixture"))?.1;
        let n = first.dim();
        let mut acc = Matrix::zeros(n, n);
        for (w, rho) in parts {
            if rho.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: rho.dim() });
            }
            acc = &acc + &rho.matrix().matrix().scale(*w);
        }
        Self::new(HermitianMatrix::new(acc)?, first.labels.clone())
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn with_labels(mut self, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.matrix.matrix()[(i, j)]
    }

    /// Diagonal in the labelled basis.
    pub fn populations(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.entry(i, i).re.max(T::zero())).collect()
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.matrix.eigenvalues()
    }

    /// Eigenvalues clipped at zero and renormalized.
    pub fn spectrum(&self) -> Vec<T> {
        let mut v: Vec<T> = self.eigenvalues().into_iter().map(|x| x.max(T::zero())).collect();
        let s: T = v.iter().copied().sum();
        v.iter_mut().for_each(|x| *x = *x / s);
        v
    }

    pub fn purity(&self) -> T {
        self.matrix.matrix().trace_product(self.matrix.matrix()).re
    }

    pub fn is_pure(&self, tol: T) -> bool {
        self.purity() >= T::one() - tol
    }

    /// Dominant eigenvector; for a pure state this is the state vector up to phase.
    pub fn principal_vector(&self) -> Vec<Complex<T>> {
        let e = self.matrix.eigh();
        e.vectors.column(self.dim() - 1)
    }

    /// Von Neumann entropy in nats.
    pub fn von_neumann_entropy(&self) -> T {
        -self.spectrum().into_iter().filter(|&x| x > T::zero()).map(|x| x * x.ln()).sum::<T>()
    }

    pub fn kron(&self, other: &DensityOperator<T>) -> DensityOperator<T> {
        let labels = (0..(self.dim() * other.dim()) as i64).collect();
        Self {
            matrix: HermitianMatrix::from_hermitian_part(&self.matrix.matrix().kron(other.matrix.matrix())),
            labels,
        }
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, u: &Matrix<T>) -> DensityOperator<T> {
        let m = &(u * self.matrix.matrix()) * &u.adjoint();
        Self { matrix: HermitianMatrix::from_hermitian_part(&m), labels: self.labels.clone() }
    }

    pub fn cast<U: Real>(&self) -> DensityOperator<U> {
        DensityOperator { matrix: self.matrix.cast(), labels: self.labels.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorKind {
    Number,
    AngularMomentumZ,
    Energy,
    Custom,
}

/// A Hermitian generator of displacements `e^{-ixG}`.
#[derive(Clone, Debug)]
pub struct Generator<T> {
    pub decomposition: SpectralDecomposition<T>,
    pub kind: GeneratorKind,
    /// Eigenvalue of each basis vector when the generator is diagonal in the basis.
    diagonal: Option<Vec<T>>,
}

impl<T: Real> Generator<T> {
    pub fn from_diagonal(values: &[T], kind: GeneratorKind) -> Self {
        let tol = default_degeneracy_tolerance(values);
        Self { decomposition: SpectralDecomposition::from_diagonal(values, tol), kind, diagonal: Some(values.to_vec()) }
    }

    /// Number operator on `0..dim`.
    pub fn number(dim: usize) -> Self {
        let v: Vec<T> = (0..dim).map(|n| T::from_usize(n).unwrap()).collect();
        Self::from_diagonal(&v, GeneratorKind::Number)
    }

    /// `J_z` on the basis `|-j>, ..., |j>`.
    pub fn angular_momentum_z(j: usize) -> Self {
        let v: Vec<T> = (0..=2 * j).map(|k| T::from_i64(k as i64 - j as i64).unwrap()).collect();
        Self::from_diagonal(&v, GeneratorKind::AngularMomentumZ)
    }

    /// Hamiltonian with each level repeated `degeneracy` times (`|E_k> (x) |d>` ordering).
    pub fn energy(levels: &[T], degeneracy: usize) -> Self {
        let v: Vec<T> = levels.iter().flat_map(|&e| std::iter::repeat_n(e, degeneracy)).collect();
        Self::from_diagonal(&v, GeneratorKind::Energy)
    }

    pub fn custom(m: &HermitianMatrix<T>, degeneracy_tol: Option<T>) -> Self {
        Self { decomposition: eigendecompose(m, degeneracy_tol), kind: GeneratorKind::Custom, diagonal: None }
    }

    pub fn dim(&self) -> usize {
        self.decomposition.dim()
    }

    pub fn diagonal_values(&self) -> Option<&[T]> {
        self.diagonal.as_deref()
    }

    /// Diagonal integer eigenvalues, when the generator is diagonal with an integer spectrum.
    pub fn integer_values(&self) -> Option<Vec<i64>> {
        let d = self.diagonal.as_ref()?;
        d.iter()
            .map(|&x| {
                let r = x.round();
                if (x - r).abs() <= T::tol(1e-9) {
                    r.to_i64()
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn matrix(&self) -> HermitianMatrix<T> {
        self.decomposition.reconstruct()
    }

    /// The generator `h(G)`; eigenspaces that `h` merges become a single eigenspace.
    pub fn map_eigenvalues(&self, h: impl Fn(T) -> T) -> Self {
        match &self.diagonal {
            Some(d) => {
                let v: Vec<T> = d.iter().map(|&x| h(x)).collect();
                Self::from_diagonal(&v, GeneratorKind::Custom)
            }
            None => Self::custom(&self.decomposition.apply(h), None),
        }
    }

    /// Eigenspace populations `p_k = tr(P_k rho)`.
    pub fn populations(&self, rho: &DensityOperator<T>) -> Vec<T> {
        self.decomposition.populations(rho)
    }

    /// `<G>`.
    pub fn mean(&self, rho: &DensityOperator<T>) -> T {
        self.populations(rho).iter().zip(&self.decomposition.eigenvalues).map(|(&p, &g)| p * g).sum()
    }

    /// Standard deviation of `G`.
    pub fn std_dev(&self, rho: &DensityOperator<T>) -> T {
        let p = self.populations(rho);
        let m: T = p.iter().zip(&self.decomposition.eigenvalues).map(|(&p, &g)| p * g).sum();
        let v: T = p.iter().zip(&self.decomposition.eigenvalues).map(|(&p, &g)| p * (g - m) * (g - m)).sum();
        v.max(T::zero()).sqrt()
    }

    /// `e^{-ixG}`.
    pub fn unitary(&self, x: T) -> Matrix<T> {
        let n = self.dim();
        if let Some(d) = &self.diagonal {
            let mut u = Matrix::zeros(n, n);
            for (i, &g) in d.iter().enumerate() {
                u[(i, i)] = expi(-x * g);
            }
            return u;
        }
        let mut u = Matrix::zeros(n, n);
        for (lam, p) in self.decomposition.eigenvalues.iter().zip(&self.decomposition.projectors) {
            u = &u + &p.matrix().scale_complex(expi(-x * *lam));
        }
        u
    }

    fn check_dim(&self, rho: &DensityOperator<T>) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: rho.dim() });
        }
        Ok(())
    }
}

/// `sum_k P_k rho P_k`.
pub fn dephase<T: Real>(rho: &DensityOperator<T>, g: &Generator<T>) -> Result<DensityOperator<T>> {
    g.check_dim(rho)?;
    let n = rho.dim();
    let m = rho.matrix().matrix();
    let out = match g.diagonal_values() {
        Some(d) => {
            let tol = g.decomposition.degeneracy_tolerance;
            Matrix::from_fn(n, n, |i, j| {
                if (d[i] - d[j]).abs() <= tol {
                    m[(i, j)]
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
        }
        None => {
            let mut acc = Matrix::zeros(n, n);
            for b in &g.decomposition.bases {
                let inner = &(&b.adjoint() * m) * b;
                acc = &acc + &(&(b * &inner) * &b.adjoint());
            }
            acc
        }
    };
    Ok(DensityOperator::from_raw(&out, rho.labels().to_vec()))
}

/// `e^{-ixG} rho e^{ixG}`.
pub fn displace<T: Real>(rho: &DensityOperator<T>, g: &Generator<T>, x: T) -> Result<DensityOperator<T>> {
    g.check_dim(rho)?;
    if let Some(d) = g.diagonal_values() {
        let m = rho.matrix().matrix();
        let out = Matrix::from_fn(rho.dim(), rho.dim(), |i, j| m[(i, j)] * expi(-x * (d[i] - d[j])));
        return Ok(DensityOperator::from_raw(&out, rho.labels().to_vec()));
    }
    Ok(rho.conjugate_by(&g.unitary(x)))
}

/// Purification `|psi> = sum_i sqrt(w_i) |v_i> (x) |i>` on system (x) ancilla, with the
/// ancilla dimension equal to the rank. Returns the pure state and the ancilla dimension.
pub fn purify<T: Real>(rho: &DensityOperator<T>) -> (DensityOperator<T>, usize) {
    let e = rho.matrix().eigh();
    let support = T::tol(SUPPORT_TOL);
    let kept: Vec<usize> = (0..rho.dim()).filter(|&i| e.values[i] > support).collect();
    let r = kept.len();
    let n = rho.dim();
    let mut psi = vec![Complex::new(T::zero(), T::zero()); n * r];
    for (a, &i) in kept.iter().enumerate() {
        let w = e.values[i].sqrt();
        for s in 0..n {
            psi[s * r + a] = e.vectors[(s, i)] * w;
        }
    }
    let labels = (0..(n * r) as i64).collect();
    let state = DensityOperator::pure(&psi, labels).expect("purification of a valid state");
    (state, r)
}

/// Reduced operator on the tensor factors listed in `keep` (ascending indices into `dims`).
/// The result is labelled by its basis index.
pub fn partial_trace<T: Real>(rho: &DensityOperator<T>, keep: &[usize], dims: &[usize]) -> Result<DensityOperator<T>> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch { expected: total, found: rho.dim() });
    }
    if keep.iter().any(|&k| k >= dims.len()) || keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("keep must list distinct factor indices in ascending order"));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let dk: usize = keep.iter().map(|&k| dims[k]).product();
    let dt: usize = traced.iter().map(|&k| dims[k]).product();
    let compose = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut digits = vec![0usize; dims.len()];
        let mut a = kept_idx;
        for &k in keep.iter().rev() {
            digits[k] = a % dims[k];
            a /= dims[k];
        }
        let mut b = traced_idx;
        for &k in traced.iter().rev() {
            digits[k] = b % dims[k];
            b /= dims[k];
        }
        digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
    };
    let m = rho.matrix().matrix();
    let out = Matrix::from_fn(dk, dk, |i, j| {
        (0..dt).fold(Complex::new(T::zero(), T::zero()), |acc, t| acc + m[(compose(i, t), compose(j, t))])
    });
    Ok(DensityOperator::from_raw(&out, (0..dk as i64).collect()))
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct DensityJson {
    dim: usize,
    labels: Vec<i64>,
    matrix: Vec<Vec<ComplexJson>>,
}

impl<T: Real> DensityOperator<T> {
    /// `{"dim": d, "labels": [...], "matrix": [[{"re": .., "im": ..}, ...], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let m = self.matrix.matrix();
        let doc = DensityJson {
            dim: self.dim(),
            labels: self.labels.clone(),
            matrix: (0..self.dim())
                .map(|i| {
                    (0..self.dim()).map(|j| ComplexJson { re: m[(i, j)].re.as_f64(), im: m[(i, j)].im.as_f64() }).collect()
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("serializable density")
    }

    /// Parses and validates (Hermiticity, positivity, unit trace, label count).
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let doc: DensityJson = serde_json::from_value(value.clone())?;
        if doc.matrix.len() != doc.dim || doc.matrix.iter().any(|r| r.len() != doc.dim) {
            return Err(invalid(format!("matrix shape does not match dim {}", doc.dim)));
        }
        let data = doc.matrix.into_iter().flatten().map(|z| Complex::new(T::lit(z.re), T::lit(z.im))).collect();
        let h = HermitianMatrix::new(Matrix::from_vec(doc.dim, doc.dim, data))?;
        Self::new(h, doc.labels)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

impl<T: Real> Serialize for DensityOperator<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn plus() -> DensityOperator<f64> {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        DensityOperator::pure(&[cplx(a, 0.0), cplx(a, 0.0)], vec![0, 1]).unwrap()
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Matrix::from_vec(2, 2, vec![cplx(1.0, 0.0), cplx(0.5, 0.0), cplx(0.4, 0.0), cplx(0.0, 0.0)]);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn density_validation() {
        let bad = HermitianMatrix::diagonal(&[0.7, 0.7]);
        assert!(matches!(DensityOperator::new(bad, vec![0, 1]), Err(Error::TraceNotOne { .. })));
        let neg = HermitianMatrix::diagonal(&[1.2, -0.2]);
        assert!(matches!(DensityOperator::new(neg, vec![0, 1]), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn dephased_plus_is_maximally_mixed() {
        let g = Generator::number(2);
        let d = dephase(&plus(), &g).unwrap();
        assert!((d.matrix().matrix() - &Matrix::identity(2).scale(0.5)).max_abs() < 1e-15);
    }

    #[test]
    fn identity_decomposes_into_single_projector() {
        let d = eigendecompose(&HermitianMatrix::<f64>::identity(4), None);
        assert_eq!(d.len(), 1);
        assert_eq!(d.multiplicities(), vec![4]);
    }

    #[test]
    fn square_root_of_projector_is_itself() {
        let p = plus();
        let r = fractional_power(p.matrix(), 0.5).unwrap();
        assert!((r.matrix() - p.matrix().matrix()).max_abs() < 1e-12);
        let inv = fractional_power(p.matrix(), -1.0).unwrap();
        assert!((inv.matrix() - p.matrix().matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn fractional_power_rejects_negative_operator() {
        let m = HermitianMatrix::diagonal(&[1.0, -1e-6]);
        assert!(fractional_power(&m, 0.5).is_err());
    }

    #[test]
    fn displacement_by_full_period_is_identity() {
        let g = Generator::number(3);
        let rho = DensityOperator::pure_indexed(&[cplx(0.5, 0.1), cplx(0.3, -0.2), cplx(0.1, 0.7)]).unwrap();
        let back = displace(&rho, &g, 2.0 * std::f64::consts::PI).unwrap();
        assert!((back.matrix().matrix() - rho.matrix().matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn displace_general_path_matches_diagonal_path() {
        let g = Generator::<f64>::number(3);
        let custom = Generator::custom(&g.matrix(), None);
        let rho = DensityOperator::pure_indexed(&[cplx(0.5, 0.1), cplx(0.3, -0.2), cplx(0.1, 0.7)]).unwrap();
        let a = displace(&rho, &g, 0.7).unwrap();
        let b = displace(&rho, &custom, 0.7).unwrap();
        assert!((a.matrix().matrix() - b.matrix().matrix()).max_abs() < 1e-12);
        let c = dephase(&rho, &custom).unwrap();
        let d = dephase(&rho, &g).unwrap();
        assert!((c.matrix().matrix() - d.matrix().matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let rho = plus();
        let back = DensityOperator::<f64>::from_json(&rho.to_json()).unwrap();
        assert_eq!(back, rho);
        let bad = serde_json::json!({"dim": 2, "labels": [0, 1], "matrix": [[{"re": 1.0, "im": 0.0}]]});
        assert!(DensityOperator::<f64>::from_json(&bad).is_err());
    }

    #[test]
    fn partial_trace_of_product() {
        let a = plus();
        let b = DensityOperator::diagonal(&[0.25, 0.75], vec![0, 1]).unwrap();
        let ab = a.kron(&b);
        let ra = partial_trace(&ab, &[0], &[2, 2]).unwrap();
        let rb = partial_trace(&ab, &[1], &[2, 2]).unwrap();
        assert!((ra.matrix().matrix() - a.matrix().matrix()).max_abs() < 1e-14);
        assert!((rb.matrix().matrix() - b.matrix().matrix()).max_abs() < 1e-14);
    }
}
