use crate::algebra::{AlgElement, AlgebraShape};
use crate::error::{Error, Result};
use crate::numerics::{
    block_diag, hstack, identity, isometry_residual, kron, max_abs, psd_factor, zeros, CMatrix,
    Tolerance, ZERO,
};

/// Unital *-representation of `A = ⊕_j M_{p_j}` on `ℂ^d`, stored as the
/// images of the matrix units.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    algebra: AlgebraShape,
    dim: usize,
    units: Vec<CMatrix>,
}

/// `W ρ(a) W* = ⊕_j a_j ⊗ I_{m_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepDecomposition {
    pub multiplicities: Vec<usize>,
    /// Unitary `W` (`d x d`).
    pub unitary: CMatrix,
}

impl Representation {
    /// Validates that the unit images satisfy the matrix-unit relations and
    /// sum to the identity.
    pub fn new(algebra: AlgebraShape, dim: usize, units: Vec<CMatrix>, tol: &Tolerance) -> Result<Self> {
        let rep = Self::unchecked(algebra, dim, units)?;
        rep.validate(tol)?;
        Ok(rep)
    }

    pub(crate) fn unchecked(algebra: AlgebraShape, dim: usize, units: Vec<CMatrix>) -> Result<Self> {
        if units.len() != algebra.dim() || units.iter().any(|u| u.shape() != (dim, dim)) {
            return Err(Error::ShapeMismatch(format!(
                "representation needs {} matrices of size {dim}x{dim}",
                algebra.dim()
            )));
        }
        for u in &units {
            crate::numerics::check_finite(u)?;
        }
        Ok(Self { algebra, dim, units })
    }

    /// Representation determined by a linear map on matrix units.
    pub fn from_fn(
        algebra: AlgebraShape,
        dim: usize,
        f: impl Fn(&AlgElement) -> CMatrix,
        tol: &Tolerance,
    ) -> Result<Self> {
        let units = (0..algebra.dim())
            .map(|u| f(&AlgElement::matrix_unit(&algebra, u)))
            .collect();
        Self::new(algebra, dim, units, tol)
    }

    /// `a ↦ ⊕_j a_j ⊗ I_{m_j}`.
    pub fn standard(algebra: &AlgebraShape, multiplicities: &[usize]) -> Result<Self> {
        if multiplicities.len() != algebra.num_blocks() {
            return Err(Error::ShapeMismatch("one multiplicity per block".into()));
        }
        let dim: usize = algebra
            .blocks()
            .iter()
            .zip(multiplicities)
            .map(|(p, m)| p * m)
            .sum();
        let units = algebra
            .units()
            .map(|(j, i, l)| {
                let parts: Vec<CMatrix> = algebra
                    .blocks()
                    .iter()
                    .zip(multiplicities)
                    .enumerate()
                    .map(|(jj, (&p, &m))| {
                        if jj == j {
                            kron(&crate::numerics::matrix_unit(p, i, l), &identity(m))
                        } else {
                            zeros(p * m, p * m)
                        }
                    })
                    .collect();
                block_diag(&parts)
            })
            .collect();
        Self::unchecked(algebra.clone(), dim, units)
    }

    /// Identity representation of `A` on `⊕_j ℂ^{p_j}`.
    pub fn identity(algebra: &AlgebraShape) -> Self {
        Self::standard(algebra, &vec![1; algebra.num_blocks()]).expect("multiplicities match")
    }

    pub fn algebra(&self) -> &AlgebraShape {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn units(&self) -> &[CMatrix] {
        &self.units
    }

    pub fn act(&self, a: &AlgElement) -> Result<CMatrix> {
        if a.shape() != &self.algebra {
            return Err(Error::ShapeMismatch("element of a foreign algebra".into()));
        }
        let mut out = zeros(self.dim, self.dim);
        for (c, u) in a.coords().into_iter().zip(&self.units) {
            if c != ZERO {
                out += u * c;
            }
        }
        Ok(out)
    }

    /// Largest violation of the *-homomorphism and unitality relations.
    pub fn relation_residual(&self) -> (f64, f64) {
        let a = &self.algebra;
        let mut hom = 0.0f64;
        for (u, (j, i, l)) in a.units().enumerate() {
            let adj = a.unit_index(j, l, i);
            hom = hom.max(max_abs(&(self.units[u].adjoint() - &self.units[adj])));
            for (v, (j2, i2, l2)) in a.units().enumerate() {
                let prod = &self.units[u] * &self.units[v];
                let dev = if j == j2 && l == i2 {
                    max_abs(&(prod - &self.units[a.unit_index(j, i, l2)]))
                } else {
                    max_abs(&prod)
                };
                hom = hom.max(dev);
            }
        }
        let mut sum = zeros(self.dim, self.dim);
        for (j, &p) in a.blocks().iter().enumerate() {
            for i in 0..p {
                sum += &self.units[a.unit_index(j, i, i)];
            }
        }
        (hom, max_abs(&(sum - identity(self.dim))))
    }

    fn validate(&self, tol: &Tolerance) -> Result<()> {
        let (hom, unit) = self.relation_residual();
        let threshold = tol.threshold(1.0).max(tol.rel_eps);
        if hom > threshold {
            return Err(Error::NotRepresentation(format!(
                "matrix-unit relations violated by {hom:.3e}"
            )));
        }
        if unit > threshold {
            return Err(Error::NotNondegenerate(unit));
        }
        Ok(())
    }

    /// Multiplicities and unitary bringing the representation to the form
    /// `⊕_j a_j ⊗ I_{m_j}`.
    pub fn decompose(&self, tol: &Tolerance) -> Result<RepDecomposition> {
        let a = &self.algebra;
        let mut multiplicities = Vec::with_capacity(a.num_blocks());
        let mut columns = Vec::new();
        for (j, &p) in a.blocks().iter().enumerate() {
            let e11 = &self.units[a.unit_index(j, 0, 0)];
            // eigenvalues of a projection are 0 or 1
            let f = psd_factor(e11, tol)?;
            let q: Vec<usize> = (0..f.rank()).filter(|&c| f.values[c] > 0.5).collect();
            let mut basis = zeros(self.dim, q.len());
            for (dst, &c) in q.iter().enumerate() {
                basis.set_column(dst, &f.basis.column(c));
            }
            let m = q.len();
            multiplicities.push(m);
            for i in 0..p {
                columns.push(&self.units[a.unit_index(j, i, 0)] * &basis);
            }
        }
        let w_adj = hstack(&columns, self.dim)?;
        if w_adj.ncols() != self.dim {
            return Err(Error::NonIntegralMultiplicity(format!(
                "multiplicities {multiplicities:?} cover {} of {} dimensions",
                w_adj.ncols(),
                self.dim
            )));
        }
        let res = isometry_residual(&w_adj);
        if res > tol.threshold(1.0).max(tol.rel_eps) * 10.0 {
            return Err(Error::NotRepresentation(format!(
                "intertwiner fails to be unitary by {res:.3e}"
            )));
        }
        Ok(RepDecomposition {
            multiplicities,
            unitary: w_adj.adjoint(),
        })
    }

    /// `a ↦ ρ(a) ⊗ I_m`.
    pub fn amplify(&self, m: usize) -> Self {
        Self {
            algebra: self.algebra.clone(),
            dim: self.dim * m,
            units: self.units.iter().map(|u| kron(u, &identity(m))).collect(),
        }
    }

    pub fn direct_sum(reps: &[Representation]) -> Result<Self> {
        let first = reps
            .first()
            .ok_or_else(|| Error::ShapeMismatch("direct sum of no representations".into()))?;
        if reps.iter().any(|r| r.algebra != first.algebra) {
            return Err(Error::ShapeMismatch(
                "representations of different algebras".into(),
            ));
        }
        let units = (0..first.algebra.dim())
            .map(|u| block_diag(&reps.iter().map(|r| r.units[u].clone()).collect::<Vec<_>>()))
            .collect();
        Ok(Self {
            algebra: first.algebra.clone(),
            dim: reps.iter().map(|r| r.dim).sum(),
            units,
        })
    }

    /// `a ↦ U ρ(a) U*`; `U` must be unitary, or the adjoint of an isometry
    /// onto an invariant subspace.
    pub fn conjugate(&self, u: &CMatrix) -> Self {
        Self {
            algebra: self.algebra.clone(),
            dim: u.nrows(),
            units: self.units.iter().map(|x| u * x * u.adjoint()).collect(),
        }
    }

    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        if self.algebra != other.algebra || self.dim != other.dim {
            return Err(Error::ShapeMismatch("representations differ in shape".into()));
        }
        Ok(self
            .units
            .iter()
            .zip(&other.units)
            .map(|(a, b)| max_abs(&(a - b)))
            .fold(0.0, f64::max))
    }
}

/// Standalone form: representation given as images of matrix units.
pub fn decompose_rep(
    algebra: &AlgebraShape,
    units: &[CMatrix],
    tol: &Tolerance,
) -> Result<RepDecomposition> {
    let dim = units.first().map(|u| u.nrows()).unwrap_or(0);
    Representation::new(algebra.clone(), dim, units.to_vec(), tol)?.decompose(tol)
}
