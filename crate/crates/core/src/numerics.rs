//! Dense complex linear algebra used by every construction in the crate.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. The Hermitian eigensolver is
//! nalgebra's Householder tridiagonalization followed by implicit QR; on top of
//! it this module fixes a deterministic output convention:
//!
//! * eigenvalues are returned in ascending order (ties keep solver order),
//! * in every eigenvector the first entry of largest modulus is rotated to be
//!   real and nonnegative.
//!
//! Positive semidefinite factorizations are rank revealing: eigenvalues at or
//! below the tolerance threshold are dropped, so the factor has exactly
//! `ε-rank(H)` rows.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Relative/absolute tolerance pair.
///
/// The effective threshold for a Hermitian matrix `H` is
/// `max(abs_floor, rel_eps * ||H||)` with `||.||` the spectral norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel_eps: f64,
    pub abs_floor: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel_eps: 1e-9,
            abs_floor: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel_eps: f64, abs_floor: f64) -> Result<Self> {
        if !(rel_eps > 0.0) || !(abs_floor >= 0.0) || !rel_eps.is_finite() || !abs_floor.is_finite()
        {
            return Err(Error::Validation(format!(
                "tolerance must satisfy rel_eps > 0 and abs_floor >= 0 (got {rel_eps}, {abs_floor})"
            )));
        }
        Ok(Self { rel_eps, abs_floor })
    }

    pub fn threshold(&self, norm: f64) -> f64 {
        self.abs_floor.max(self.rel_eps * norm)
    }
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Matrix unit `E_ij` of size `n x n`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = zeros(n, n);
    m[(i, j)] = ONE;
    m
}

pub fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Frobenius norm; zero for empty matrices.
pub fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry modulus; zero for empty matrices.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * re(0.5)
}

/// `max_abs(a - b)`, with a shape check.
pub fn max_diff(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(max_abs(&(a - b)))
}

/// Spectral data of a Hermitian matrix under the crate's determinism convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Columns are the eigenvectors matching `values`.
    pub vectors: CMatrix,
    /// Tolerance threshold derived from the spectral norm of the input.
    pub threshold: f64,
}

impl Eigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn reconstruct(&self) -> CMatrix {
        let d = DVector::from_iterator(self.values.len(), self.values.iter().map(|&v| re(v)));
        &self.vectors * CMatrix::from_diagonal(&d) * self.vectors.adjoint()
    }
}

fn fix_phase(col: &mut nalgebra::DVectorViewMut<'_, C64>) {
    let mut best = 0usize;
    let mut best_mod = -1.0;
    for (i, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best_mod {
            best_mod = m;
            best = i;
        }
    }
    if best_mod > 0.0 {
        let phase = col[best].conj() / best_mod;
        for z in col.iter_mut() {
            *z *= phase;
        }
        // remove rounding residue on the pivot
        col[best] = re(col[best].re);
    }
}

/// Hermitian eigendecomposition `H = U diag(λ) U*`.
///
/// Fails with `NotHermitian` when `||H - H*||_F` exceeds the tolerance threshold.
pub fn eig_hermitian(h: &CMatrix, tol: &Tolerance) -> Result<Eigen> {
    if h.nrows() != h.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition needs a square matrix, got {:?}",
            h.shape()
        )));
    }
    check_finite(h)?;
    let n = h.nrows();
    if n == 0 {
        return Ok(Eigen {
            values: vec![],
            vectors: zeros(0, 0),
            threshold: tol.abs_floor,
        });
    }
    let sym = hermitian_part(h);
    let asymmetry = frob(&(h - h.adjoint()));
    let se = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
        fix_phase(&mut vectors.column_mut(dst));
    }
    let norm = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let threshold = tol.threshold(norm);
    if asymmetry > threshold {
        return Err(Error::NotHermitian {
            asymmetry,
            threshold,
        });
    }
    Ok(Eigen {
        values,
        vectors,
        threshold,
    })
}

/// Rank-revealing factorization `H = L* L` of a positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdFactor {
    /// `r x n` with `r` the ε-rank; rows ordered by descending eigenvalue.
    pub factor: CMatrix,
    /// Retained eigenvalues, descending.
    pub values: Vec<f64>,
    /// `n x r` orthonormal eigenvectors for the retained eigenvalues.
    pub basis: CMatrix,
    pub threshold: f64,
    pub min_eigenvalue: f64,
}

impl PsdFactor {
    pub fn rank(&self) -> usize {
        self.values.len()
    }

    /// `n x r` matrix `R` with `factor * R = I_r`.
    pub fn right_inverse(&self) -> CMatrix {
        let mut r = self.basis.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let s = re(1.0 / v.sqrt());
            for z in r.column_mut(j).iter_mut() {
                *z *= s;
            }
        }
        r
    }
}

/// Factor a PSD matrix as `L* L` with `rows(L)` equal to the number of
/// eigenvalues above threshold. Eigenvalues in `(-threshold, threshold]` are
/// clipped to zero.
pub fn psd_factor(h: &CMatrix, tol: &Tolerance) -> Result<PsdFactor> {
    let eig = eig_hermitian(h, tol)?;
    let n = h.nrows();
    let min_eigenvalue = eig.min();
    if n > 0 && min_eigenvalue < -eig.threshold {
        return Err(Error::NotPsd {
            eigenvalue: min_eigenvalue,
        });
    }
    let keep: Vec<usize> = (0..n).rev().filter(|&i| eig.values[i] > eig.threshold).collect();
    let r = keep.len();
    let mut factor = zeros(r, n);
    let mut basis = zeros(n, r);
    let mut values = Vec::with_capacity(r);
    for (row, &i) in keep.iter().enumerate() {
        let lam = eig.values[i];
        values.push(lam);
        let col = eig.vectors.column(i);
        basis.set_column(row, &col);
        let s = lam.sqrt();
        for j in 0..n {
            factor[(row, j)] = col[j].conj() * s;
        }
    }
    Ok(PsdFactor {
        factor,
        values,
        basis,
        threshold: eig.threshold,
        min_eigenvalue,
    })
}

/// Minimum eigenvalue and the threshold it is judged against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdWitness {
    pub min_eigenvalue: f64,
    pub threshold: f64,
}

impl PsdWitness {
    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= -self.threshold
    }
}

pub fn psd_witness(h: &CMatrix, tol: &Tolerance) -> Result<PsdWitness> {
    let eig = eig_hermitian(h, tol)?;
    Ok(PsdWitness {
        min_eigenvalue: if h.nrows() == 0 { 0.0 } else { eig.min() },
        threshold: eig.threshold,
    })
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Row-major vectorization as a column.
pub fn vec(a: &CMatrix) -> CMatrix {
    let (r, c) = a.shape();
    CMatrix::from_iterator(r * c, 1, (0..r).flat_map(|i| (0..c).map(move |j| a[(i, j)])))
}

/// Inverse of [`vec`].
pub fn unvec(v: &CMatrix, rows: usize, cols: usize) -> Result<CMatrix> {
    if v.ncols() != 1 || v.nrows() != rows * cols {
        return Err(Error::ShapeMismatch(format!(
            "cannot unvec {:?} into {rows}x{cols}",
            v.shape()
        )));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| v[(i * cols + j, 0)]))
}

/// Block-diagonal matrix; empty blocks are allowed.
pub fn block_diag(blocks: &[CMatrix]) -> CMatrix {
    let r: usize = blocks.iter().map(|b| b.nrows()).sum();
    let c: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(r, c);
    let (mut i, mut j) = (0, 0);
    for b in blocks {
        out.view_mut((i, j), b.shape()).copy_from(b);
        i += b.nrows();
        j += b.ncols();
    }
    out
}

pub fn hstack(blocks: &[CMatrix], rows: usize) -> Result<CMatrix> {
    let c: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, c);
    let mut j = 0;
    for b in blocks {
        if b.nrows() != rows {
            return Err(Error::ShapeMismatch(format!(
                "hstack: {} rows vs {rows}",
                b.nrows()
            )));
        }
        out.view_mut((0, j), b.shape()).copy_from(b);
        j += b.ncols();
    }
    Ok(out)
}

pub fn vstack(blocks: &[CMatrix], cols: usize) -> Result<CMatrix> {
    let r: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(r, cols);
    let mut i = 0;
    for b in blocks {
        if b.ncols() != cols {
            return Err(Error::ShapeMismatch(format!(
                "vstack: {} cols vs {cols}",
                b.ncols()
            )));
        }
        out.view_mut((i, 0), b.shape()).copy_from(b);
        i += b.nrows();
    }
    Ok(out)
}

/// `max_abs(V* V - I)`.
pub fn isometry_residual(v: &CMatrix) -> f64 {
    max_abs(&(v.adjoint() * v - identity(v.ncols())))
}

/// Minimal-norm least-squares solution `X` of `X * src = dst`, where the
/// columns of `src` are generators. Returns `X` together with the residual
/// `max_abs(X * src - dst)`.
pub fn solve_on_generators(src: &CMatrix, dst: &CMatrix, tol: &Tolerance) -> Result<(CMatrix, f64)> {
    if src.ncols() != dst.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "generator counts differ: {} vs {}",
            src.ncols(),
            dst.ncols()
        )));
    }
    // src = Q L with Q orthonormal columns, from the Gram src* src = L* L
    let gram = src.adjoint() * src;
    let f = psd_factor(&gram, tol)?;
    // X = dst * pinv(src) = dst * U diag(1/λ) U* src*
    let mut scaled = f.basis.clone();
    for (j, &v) in f.values.iter().enumerate() {
        let s = re(1.0 / v);
        for z in scaled.column_mut(j).iter_mut() {
            *z *= s;
        }
    }
    let x = dst * &scaled * f.basis.adjoint() * src.adjoint();
    let residual = max_abs(&(&x * src - dst));
    Ok((x, residual))
}

/// Orthonormal basis (columns) of the column space of `m`, using the
/// deterministic eigenvector convention on `m m*`.
pub fn range_basis(m: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let f = psd_factor(&(m * m.adjoint()), tol)?;
    Ok(f.basis)
}
