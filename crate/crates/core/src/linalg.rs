//! Dense complex matrices and a cyclic Jacobi eigensolver for Hermitian ones.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interval::IntervalSet;

pub type C64 = Complex64;

/// Maximum number of full Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;
/// Sweeps stop once the off-diagonal Frobenius norm drops below this
/// fraction of the full Frobenius norm.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;
/// Tolerance on `|h_jk - conj(h_kj)|` accepted when building a [`HermitianMatrix`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Default exclusion band around boundary points for [`spectral_projector`].
pub const DEFAULT_GUARD: f64 = 1e-9;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Rows of real entries. Panics on ragged input.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| C64::new(rows[i][j], 0.0))
    }

    /// `u v*`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
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

    pub fn column(&self, k: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, k)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &CMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, rhs: &CMatrix) -> Self {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &CMatrix) -> Self {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| a * s).collect() }
    }

    fn zip_with(&self, rhs: &CMatrix, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Leading `rows x cols` block.
    pub fn leading_block(&self, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(i, j)])
    }

    /// Sub-matrix picking the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &CMatrix) -> f64 {
        self.sub(rhs).max_abs()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// `⟨u, v⟩`, conjugate-linear in the first slot.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// A square matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates symmetry up to [`HERMITIAN_TOL`] and stores the exactly
    /// symmetrized matrix `(M + M*) / 2`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
        }
        if m.rows == 0 {
            return Err(Error::EmptyMatrix);
        }
        let n = m.rows;
        for i in 0..n {
            for j in i..n {
                let deviation = (m[(i, j)] - m[(j, i)].conj()).norm();
                if deviation > HERMITIAN_TOL {
                    return Err(Error::NotHermitian { row: i, col: j, deviation });
                }
            }
        }
        let sym = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(m[(i, i)].re, 0.0)
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * 0.5
            }
        });
        Ok(HermitianMatrix(sym))
    }

    pub fn from_real_diag(diag: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_real_diag(diag))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(CMatrix::from_real_rows(rows))
    }

    /// Real symmetric tridiagonal matrix.
    pub fn tridiagonal(diag: &[f64], off: &[f64]) -> Result<Self> {
        if off.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch { expected: diag.len().saturating_sub(1), found: off.len() });
        }
        let mut m = CMatrix::from_real_diag(diag);
        for (i, &b) in off.iter().enumerate() {
            m[(i, i + 1)] = C64::new(b, 0.0);
            m[(i + 1, i)] = C64::new(b, 0.0);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// `self + φφ*`
    pub fn plus_rank_one(&self, phi: &[C64]) -> Result<Self> {
        if phi.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: phi.len() });
        }
        Self::new(self.0.add(&CMatrix::outer(phi, phi)))
    }

    pub fn eig(&self) -> Result<EigenSystem> {
        eig_hermitian(self)
    }
}

/// Eigenvalues in nondecreasing order; column `k` of `vectors` is a unit
/// eigenvector for `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `Σ values[k] v_k v_k*`
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| self.vectors[(i, k)] * self.vectors[(j, k)].conj() * self.values[k]).sum()
        })
    }

    /// Spectral norm, `max |values|`.
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Indices `k` with `values[k] ∈ set`.
    pub fn indices_in(&self, set: &IntervalSet) -> Vec<usize> {
        (0..self.dim()).filter(|&k| set.contains(self.values[k])).collect()
    }

    /// `Σ_{k ∈ idx} v_k v_k*`
    pub fn projector_on(&self, idx: &[usize]) -> Projector {
        let n = self.dim();
        let matrix = CMatrix::from_fn(n, n, |i, j| {
            idx.iter().map(|&k| self.vectors[(i, k)] * self.vectors[(j, k)].conj()).sum()
        });
        Projector { matrix, rank: idx.len() }
    }
}

/// Orthogonal projector with its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    pub matrix: CMatrix,
    pub rank: usize,
}

impl Projector {
    /// `1 - P`
    pub fn complement(&self) -> Projector {
        let n = self.matrix.rows();
        Projector { matrix: CMatrix::identity(n).sub(&self.matrix), rank: n - self.rank }
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Deterministic: sweeps visit `(p, q)` in row order, eigenpairs are sorted
/// ascending (ties keep sweep order), and each eigenvector is rephased so its
/// first entry of modulus above `1e-8` is real and positive.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<EigenSystem> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = CMatrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * a.frobenius_norm();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    for k in 0..n {
        if let Some(i) = (0..n).find(|&i| vectors[(i, k)].norm() > 1e-8) {
            let pivot = vectors[(i, k)];
            let phase = pivot.conj() / pivot.norm();
            for r in 0..n {
                vectors[(r, k)] *= phase;
            }
        }
    }
    Ok(EigenSystem { values, vectors })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating `a[p][q]`: first a diagonal
/// phase makes the entry real, then a real plane rotation zeroes it.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let back = (apq / r).conj();

    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = back * -s;
    let g_qq = back * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Orthogonal projector onto eigenvectors with eigenvalue in `set`.
///
/// Fails with [`Error::BoundaryCollision`] if an eigenvalue lies within
/// `guard` of a finite boundary point, since rank would then depend on
/// rounding.
pub fn spectral_projector(eig: &EigenSystem, set: &IntervalSet, guard: f64) -> Result<Projector> {
    for e in set.boundary_points() {
        if let Some(&lambda) = eig.values.iter().find(|&&l| (l - e).abs() <= guard) {
            return Err(Error::BoundaryCollision { eigenvalue: lambda, boundary: e });
        }
    }
    Ok(eig.projector_on(&eig.indices_in(set)))
}

/// Largest singular value of a square matrix, `sqrt(λ_max(M* M))`.
pub fn op_norm(m: &CMatrix) -> f64 {
    assert!(m.is_square(), "op_norm expects a square matrix");
    if m.rows() == 0 {
        return 0.0;
    }
    let gram = HermitianMatrix::new(m.adjoint().matmul(m)).expect("M*M is Hermitian");
    let eig = eig_hermitian(&gram).expect("Jacobi converges on Gram matrices");
    eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// Determinant by LU factorization with partial pivoting.
pub fn determinant(m: &CMatrix) -> C64 {
    assert!(m.is_square(), "determinant expects a square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .expect("nonempty pivot range");
        if a[(pivot, col)].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pivot != col {
            for k in 0..n {
                let tmp = a[(col, k)];
                a[(col, k)] = a[(pivot, k)];
                a[(pivot, k)] = tmp;
            }
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for i in col + 1..n {
            let factor = a[(i, col)] / p;
            for k in col + 1..n {
                let v = a[(col, k)];
                a[(i, k)] -= factor * v;
            }
        }
    }
    det
}
