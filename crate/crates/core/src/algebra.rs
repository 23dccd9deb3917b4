//! Finite-dimensional C*-algebras `B = M_{n_1} ⊕ ... ⊕ M_{n_K}`.
//!
//! Elements are tuples of square complex blocks. The matrix-unit basis is
//! ordered block by block, and row-major inside a block:
//! `E^{(1)}_{11}, E^{(1)}_{12}, ..., E^{(K)}_{n_K n_K}`. Coordinates of an element
//! in that basis are just its block entries in the same order.

use crate::error::{Error, Result};
use crate::numerics::{
    eig_hermitian, frob, hermitian_part, identity, matrix_unit, max_abs, re, spectral_norm, zeros,
    CMatrix, Tolerance, C64, ZERO,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraShape {
    blocks: Vec<usize>,
}

impl AlgebraShape {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::ShapeMismatch(format!(
                "algebra blocks must be nonempty and positive, got {blocks:?}"
            )));
        }
        Ok(Self { blocks })
    }

    /// The scalars `ℂ = M_1`.
    pub fn scalars() -> Self {
        Self { blocks: vec![1] }
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, k: usize) -> usize {
        self.blocks[k]
    }

    /// Complex dimension `Σ n_k²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// Coordinate offset of block `k`.
    pub fn offset(&self, k: usize) -> usize {
        self.blocks[..k].iter().map(|n| n * n).sum()
    }

    pub fn unit_index(&self, k: usize, i: usize, j: usize) -> usize {
        self.offset(k) + i * self.blocks[k] + j
    }

    /// `(block, row, col)` of the matrix unit with index `u`.
    pub fn unit_position(&self, mut u: usize) -> (usize, usize, usize) {
        for (k, &n) in self.blocks.iter().enumerate() {
            if u < n * n {
                return (k, u / n, u % n);
            }
            u -= n * n;
        }
        panic!("matrix unit index out of range");
    }

    /// All matrix units `(block, row, col)` in basis order.
    pub fn units(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(k, &n)| (0..n).flat_map(move |i| (0..n).map(move |j| (k, i, j))))
    }

    /// `M_m(B)` realized as `⊕_k M_{m n_k}`.
    pub fn amplify(&self, m: usize) -> Result<Self> {
        Self::new(self.blocks.iter().map(|n| n * m).collect())
    }

    fn expect_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch(format!(
                "algebra {:?} vs {:?}",
                self.blocks, other.blocks
            )));
        }
        Ok(())
    }
}

/// Element of a block algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgElement {
    shape: AlgebraShape,
    blocks: Vec<CMatrix>,
}

/// Outcome of a spectral positivity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Positivity {
    pub positive: bool,
    /// Most negative eigenvalue over all blocks (of the hermitian part).
    pub min_eigenvalue: f64,
    pub block: usize,
    /// `||b - b*||_F` over all blocks.
    pub asymmetry: f64,
    pub threshold: f64,
}

impl AlgElement {
    pub fn new(shape: AlgebraShape, blocks: Vec<CMatrix>) -> Result<Self> {
        if blocks.len() != shape.num_blocks()
            || blocks
                .iter()
                .zip(shape.blocks())
                .any(|(b, &n)| b.shape() != (n, n))
        {
            return Err(Error::ShapeMismatch(format!(
                "element blocks do not match algebra {:?}",
                shape.blocks()
            )));
        }
        Ok(Self { shape, blocks })
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        let blocks = shape.blocks().iter().map(|&n| zeros(n, n)).collect();
        Self {
            shape: shape.clone(),
            blocks,
        }
    }

    pub fn unit(shape: &AlgebraShape) -> Self {
        let blocks = shape.blocks().iter().map(|&n| identity(n)).collect();
        Self {
            shape: shape.clone(),
            blocks,
        }
    }

    pub fn matrix_unit(shape: &AlgebraShape, u: usize) -> Self {
        let (k, i, j) = shape.unit_position(u);
        let mut e = Self::zero(shape);
        e.blocks[k] = matrix_unit(shape.block(k), i, j);
        e
    }

    pub fn from_coords(shape: &AlgebraShape, coords: &[C64]) -> Result<Self> {
        if coords.len() != shape.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates for an algebra of dimension {}",
                coords.len(),
                shape.dim()
            )));
        }
        let mut off = 0;
        let blocks = shape
            .blocks()
            .iter()
            .map(|&n| {
                let b = CMatrix::from_fn(n, n, |i, j| coords[off + i * n + j]);
                off += n * n;
                b
            })
            .collect();
        Ok(Self {
            shape: shape.clone(),
            blocks,
        })
    }

    pub fn coords(&self) -> Vec<C64> {
        self.blocks
            .iter()
            .flat_map(|b| {
                let n = b.nrows();
                (0..n).flat_map(move |i| (0..n).map(move |j| b[(i, j)]))
            })
            .collect()
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMatrix {
        &self.blocks[k]
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Result<Self> {
        self.shape.expect_same(&other.shape)?;
        Ok(Self {
            shape: self.shape.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b * z).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    /// C*-norm: the largest block spectral norm.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(max_abs).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Spectral positivity: every block hermitian within tolerance with
    /// spectrum above `-threshold`.
    pub fn is_positive(&self, tol: &Tolerance) -> Positivity {
        let threshold = tol.threshold(self.norm());
        let asymmetry = self
            .blocks
            .iter()
            .map(|b| frob(&(b - b.adjoint())).powi(2))
            .sum::<f64>()
            .sqrt();
        let mut min_eigenvalue = f64::INFINITY;
        let mut block = 0;
        for (k, b) in self.blocks.iter().enumerate() {
            // hermitian part is hermitian by construction, so this cannot fail
            let eig = eig_hermitian(&hermitian_part(b), tol).expect("hermitian part");
            if eig.min() < min_eigenvalue {
                min_eigenvalue = eig.min();
                block = k;
            }
        }
        Positivity {
            positive: asymmetry <= threshold && min_eigenvalue >= -threshold,
            min_eigenvalue,
            block,
            asymmetry,
            threshold,
        }
    }

    /// The positive square root via spectral calculus.
    pub fn sqrt_positive(&self, tol: &Tolerance) -> Result<Self> {
        let p = self.is_positive(tol);
        if !p.positive {
            return Err(Error::NotPositive {
                eigenvalue: p.min_eigenvalue,
                block: p.block,
            });
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let eig = eig_hermitian(&hermitian_part(b), tol)?;
                let d = nalgebra::DVector::from_iterator(
                    eig.values.len(),
                    eig.values.iter().map(|&v| re(v.max(0.0).sqrt())),
                );
                Ok(&eig.vectors * CMatrix::from_diagonal(&d) * eig.vectors.adjoint())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            shape: self.shape.clone(),
            blocks,
        })
    }
}

/// Linear functional `φ(b) = Σ_k tr(ρ_k b_k)` given by density blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    shape: AlgebraShape,
    densities: Vec<CMatrix>,
}

impl Functional {
    /// Builds a positive functional; every density must be PSD.
    pub fn new(shape: AlgebraShape, densities: Vec<CMatrix>, tol: &Tolerance) -> Result<Self> {
        let as_elem = AlgElement::new(shape, densities)?;
        let p = as_elem.is_positive(tol);
        if !p.positive {
            return Err(Error::NotPositive {
                eigenvalue: p.min_eigenvalue,
                block: p.block,
            });
        }
        Ok(Self {
            shape: as_elem.shape,
            densities: as_elem.blocks,
        })
    }

    /// `tr(b)/n` on a single block `M_n`; on several blocks, the normalized
    /// trace of the direct sum.
    pub fn normalized_trace(shape: &AlgebraShape) -> Self {
        let total: usize = shape.blocks().iter().sum();
        let densities = shape
            .blocks()
            .iter()
            .map(|&n| identity(n) * re(1.0 / total as f64))
            .collect();
        Self {
            shape: shape.clone(),
            densities,
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn densities(&self) -> &[CMatrix] {
        &self.densities
    }

    pub fn apply(&self, b: &AlgElement) -> Result<C64> {
        self.shape.expect_same(b.shape())?;
        Ok(self
            .densities
            .iter()
            .zip(b.blocks())
            .map(|(rho, bk)| (rho * bk).trace())
            .fold(ZERO, |acc, z| acc + z))
    }
}
