use crate::algebra::{AlgElement, AlgebraShape};
use crate::error::{Error, Result};
use crate::numerics::{block_diag, identity, kron, vstack, zeros, CMatrix, Tolerance};

use super::module::{AdjointableOp, HilbertModule, ModVector};
use super::rep::Representation;

/// Correspondence from `A` to `B`: a Hilbert `B`-module with a unital left
/// action of `A`, one representation per right block.
#[derive(Debug, Clone, PartialEq)]
pub struct Correspondence {
    module: HilbertModule,
    left: AlgebraShape,
    reps: Vec<Representation>,
}

impl Correspondence {
    pub fn new(module: HilbertModule, left: AlgebraShape, reps: Vec<Representation>) -> Result<Self> {
        if reps.len() != module.ambient().len()
            || reps
                .iter()
                .zip(module.ambient())
                .any(|(r, &d)| r.dim() != d || r.algebra() != &left)
        {
            return Err(Error::ShapeMismatch(
                "left action does not match the module".into(),
            ));
        }
        Ok(Self { module, left, reps })
    }

    /// From unit images `action[u][k]` (`d_k x d_k`), validated.
    pub fn from_units(
        module: HilbertModule,
        left: AlgebraShape,
        action: Vec<Vec<CMatrix>>,
        tol: &Tolerance,
    ) -> Result<Self> {
        if action.len() != left.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} unit images for a left algebra of dimension {}",
                action.len(),
                left.dim()
            )));
        }
        let nb = module.ambient().len();
        if action.iter().any(|a| a.len() != nb) {
            return Err(Error::ShapeMismatch("one matrix per right block".into()));
        }
        let reps = (0..nb)
            .map(|k| {
                let units = action.iter().map(|a| a[k].clone()).collect();
                Representation::new(left.clone(), module.ambient()[k], units, tol)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(module, left, reps)
    }

    /// `B` over itself with left multiplication.
    pub fn trivial(shape: &AlgebraShape) -> Self {
        let reps = (0..shape.num_blocks())
            .map(|k| {
                let mut m = vec![0; shape.num_blocks()];
                m[k] = 1;
                Representation::standard(shape, &m).expect("shape matches")
            })
            .collect();
        Self {
            module: HilbertModule::trivial(shape),
            left: shape.clone(),
            reps,
        }
    }

    /// `B` acting on `⊕_k ℂ^{n_k}` as a correspondence from `B` to `ℂ`.
    pub fn identity_rep(shape: &AlgebraShape) -> Self {
        let total = shape.blocks().iter().sum();
        Self {
            module: HilbertModule::new(AlgebraShape::scalars(), vec![total]).expect("one block"),
            left: shape.clone(),
            reps: vec![Representation::identity(shape)],
        }
    }

    /// Correspondence from `A` to `ℂ` given by one representation.
    pub fn from_rep(rep: Representation) -> Self {
        Self {
            module: HilbertModule::new(AlgebraShape::scalars(), vec![rep.dim()]).expect("one block"),
            left: rep.algebra().clone(),
            reps: vec![rep],
        }
    }

    pub fn module(&self) -> &HilbertModule {
        &self.module
    }

    pub fn left(&self) -> &AlgebraShape {
        &self.left
    }

    pub fn right(&self) -> &AlgebraShape {
        self.module.shape()
    }

    pub fn reps(&self) -> &[Representation] {
        &self.reps
    }

    /// Unit images `[u][k]`.
    pub fn action_units(&self) -> Vec<Vec<CMatrix>> {
        (0..self.left.dim())
            .map(|u| self.reps.iter().map(|r| r.units()[u].clone()).collect())
            .collect()
    }

    pub fn act(&self, a: &AlgElement) -> Result<Vec<CMatrix>> {
        self.reps.iter().map(|r| r.act(a)).collect()
    }

    pub fn left_op(&self, a: &AlgElement) -> Result<AdjointableOp> {
        AdjointableOp::new(self.module.clone(), self.module.clone(), self.act(a)?)
    }

    /// `a x`.
    pub fn apply(&self, a: &AlgElement, x: &ModVector) -> Result<ModVector> {
        self.left_op(a)?.apply(x)
    }

    /// Largest violation of the representation relations over all blocks.
    pub fn relation_residual(&self) -> (f64, f64) {
        self.reps
            .iter()
            .map(|r| r.relation_residual())
            .fold((0.0, 0.0), |(a, b), (c, d)| (a.max(c), b.max(d)))
    }
}

/// Data of the interior tensor product `E ⊙ F` of a Hilbert `B`-module `E`
/// with a correspondence `F` from `B` to `C`.
#[derive(Debug, Clone)]
pub struct TensorMap {
    left: HilbertModule,
    right: Correspondence,
    /// `[l][k]`: multiplicity of block `k` of `B` in block `l` of `F`.
    multiplicities: Vec<Vec<usize>>,
    unitaries: Vec<CMatrix>,
    module: HilbertModule,
}

impl TensorMap {
    pub fn new(left: &HilbertModule, right: &Correspondence, tol: &Tolerance) -> Result<Self> {
        if left.shape() != right.left() {
            return Err(Error::MiddleAlgebraMismatch);
        }
        let mut multiplicities = Vec::with_capacity(right.reps.len());
        let mut unitaries = Vec::with_capacity(right.reps.len());
        let mut ambient = Vec::with_capacity(right.reps.len());
        for rep in &right.reps {
            let d = rep.decompose(tol)?;
            ambient.push(
                left.ambient()
                    .iter()
                    .zip(&d.multiplicities)
                    .map(|(dk, m)| dk * m)
                    .sum(),
            );
            multiplicities.push(d.multiplicities);
            unitaries.push(d.unitary);
        }
        let module = HilbertModule::new(right.right().clone(), ambient)?;
        Ok(Self {
            left: left.clone(),
            right: right.clone(),
            multiplicities,
            unitaries,
            module,
        })
    }

    pub fn module(&self) -> &HilbertModule {
        &self.module
    }

    pub fn left_module(&self) -> &HilbertModule {
        &self.left
    }

    pub fn right(&self) -> &Correspondence {
        &self.right
    }

    pub fn multiplicities(&self) -> &[Vec<usize>] {
        &self.multiplicities
    }

    /// `blockdiag_k(T_k ⊗ I_{m_kl})` for blockwise maps `T_k`.
    fn amplified(&self, l: usize, blocks: &[CMatrix]) -> CMatrix {
        let parts: Vec<CMatrix> = blocks
            .iter()
            .zip(&self.multiplicities[l])
            .map(|(t, &m)| kron(t, &identity(m)))
            .collect();
        block_diag(&parts)
    }

    /// The creation operator `L_x: y ↦ x ⊙ y` from `F` into `E ⊙ F`.
    pub fn left_op(&self, x: &ModVector) -> Result<AdjointableOp> {
        self.left.expect_same(x.module())?;
        let blocks = (0..self.module.ambient().len())
            .map(|l| self.amplified(l, x.blocks()) * &self.unitaries[l])
            .collect();
        AdjointableOp::new(self.right.module.clone(), self.module.clone(), blocks)
    }

    pub fn embed(&self, x: &ModVector, y: &ModVector) -> Result<ModVector> {
        self.left.expect_same(x.module())?;
        self.right.module.expect_same(y.module())?;
        let blocks = (0..self.module.ambient().len())
            .map(|l| self.amplified(l, x.blocks()) * (&self.unitaries[l] * y.block(l)))
            .collect();
        ModVector::new(self.module.clone(), blocks)
    }

    /// `T ⊙ id_F` for `T: E → E'` where `other` is the tensor map of `E'`
    /// with the same `F`.
    pub fn lift_op(&self, t: &AdjointableOp, other: &TensorMap) -> Result<AdjointableOp> {
        self.left.expect_same(t.domain())?;
        other.left.expect_same(t.codomain())?;
        if other.right != self.right {
            return Err(Error::ShapeMismatch("tensor maps over different F".into()));
        }
        let blocks = (0..self.module.ambient().len())
            .map(|l| self.amplified(l, t.blocks()))
            .collect();
        AdjointableOp::new(self.module.clone(), other.module.clone(), blocks)
    }

    /// Left action on `E ⊙ F` induced by a left action on `E`.
    pub fn lift_action(&self, left_of_e: &[Representation], algebra: &AlgebraShape) -> Result<Vec<Representation>> {
        if left_of_e.len() != self.left.ambient().len() {
            return Err(Error::ShapeMismatch("one representation per block".into()));
        }
        (0..self.module.ambient().len())
            .map(|l| {
                let units = (0..algebra.dim())
                    .map(|u| {
                        let per_k: Vec<CMatrix> =
                            left_of_e.iter().map(|r| r.units()[u].clone()).collect();
                        self.amplified(l, &per_k)
                    })
                    .collect();
                Representation::unchecked(algebra.clone(), self.module.ambient()[l], units)
            })
            .collect()
    }
}

/// Tensor product of correspondences `E ⊙ F` from `A` to `C`.
pub fn tensor(e: &Correspondence, f: &Correspondence, tol: &Tolerance) -> Result<(Correspondence, TensorMap)> {
    let map = TensorMap::new(&e.module, f, tol)?;
    let reps = map.lift_action(&e.reps, &e.left)?;
    let corr = Correspondence::new(map.module.clone(), e.left.clone(), reps)?;
    Ok((corr, map))
}

/// Dual correspondence `E*` from `B` to `K(E) = ⊕_{d_k > 0} M_{d_k}`.
#[derive(Debug, Clone)]
pub struct Dual {
    source: HilbertModule,
    /// Right blocks of `E` that survive (`d_k > 0`).
    kept: Vec<usize>,
    compacts: AlgebraShape,
    corr: Correspondence,
}

impl Dual {
    pub fn new(module: &HilbertModule) -> Result<Self> {
        let kept: Vec<usize> = (0..module.ambient().len())
            .filter(|&k| module.ambient()[k] > 0)
            .collect();
        if kept.is_empty() {
            return Err(Error::ShapeMismatch("the zero module has no dual".into()));
        }
        let b = module.shape();
        let compacts = AlgebraShape::new(kept.iter().map(|&k| module.ambient()[k]).collect())?;
        let dual_module = HilbertModule::new(
            compacts.clone(),
            kept.iter().map(|&k| b.block(k)).collect(),
        )?;
        let reps = kept
            .iter()
            .map(|&k| {
                let mut m = vec![0; b.num_blocks()];
                m[k] = 1;
                Representation::standard(b, &m)
            })
            .collect::<Result<Vec<_>>>()?;
        let corr = Correspondence::new(dual_module, b.clone(), reps)?;
        Ok(Self {
            source: module.clone(),
            kept,
            compacts,
            corr,
        })
    }

    pub fn correspondence(&self) -> &Correspondence {
        &self.corr
    }

    /// Shape of `K(E)`.
    pub fn compacts(&self) -> &AlgebraShape {
        &self.compacts
    }

    /// `x ↦ x*`.
    pub fn dual_vector(&self, x: &ModVector) -> Result<ModVector> {
        self.source.expect_same(x.module())?;
        let blocks = self.kept.iter().map(|&k| x.block(k).adjoint()).collect();
        ModVector::new(self.corr.module().clone(), blocks)
    }

    /// The rank-one operator `θ_{x,y} = x ⟨y, ·⟩` as an element of `K(E)`.
    pub fn rank_one(&self, x: &ModVector, y: &ModVector) -> Result<AlgElement> {
        self.source.expect_same(x.module())?;
        self.source.expect_same(y.module())?;
        let blocks = self
            .kept
            .iter()
            .map(|&k| x.block(k) * y.block(k).adjoint())
            .collect();
        AlgElement::new(self.compacts.clone(), blocks)
    }

    /// `E` as a correspondence from `K(E)` to `B` with the identity action.
    pub fn module_over_compacts(&self) -> Result<Correspondence> {
        let nb = self.source.ambient().len();
        let reps = (0..nb)
            .map(|k| match self.kept.iter().position(|&kk| kk == k) {
                Some(pos) => {
                    let mut m = vec![0; self.kept.len()];
                    m[pos] = 1;
                    Representation::standard(&self.compacts, &m)
                }
                None => Representation::unchecked(
                    self.compacts.clone(),
                    0,
                    vec![zeros(0, 0); self.compacts.dim()],
                ),
            })
            .collect::<Result<Vec<_>>>()?;
        Correspondence::new(self.source.clone(), self.compacts.clone(), reps)
    }

    /// Shape of the linking algebra `⊕_k M_{n_k + d_k}`.
    pub fn linking_shape(&self) -> Result<AlgebraShape> {
        AlgebraShape::new(
            self.source
                .shape()
                .blocks()
                .iter()
                .zip(self.source.ambient())
                .map(|(n, d)| n + d)
                .collect(),
        )
    }

    /// The linking algebra element `[[b, x*], [y, a]]`.
    pub fn linking_element(
        &self,
        b: &AlgElement,
        x: &ModVector,
        y: &ModVector,
        a: &AlgElement,
    ) -> Result<AlgElement> {
        self.source.expect_same(x.module())?;
        self.source.expect_same(y.module())?;
        if b.shape() != self.source.shape() || a.shape() != &self.compacts {
            return Err(Error::ShapeMismatch("linking entries of the wrong algebras".into()));
        }
        let shape = self.linking_shape()?;
        let blocks = (0..self.source.ambient().len())
            .map(|k| {
                let n = self.source.shape().block(k);
                let d = self.source.ambient()[k];
                let ak = match self.kept.iter().position(|&kk| kk == k) {
                    Some(pos) => a.block(pos).clone(),
                    None => zeros(0, 0),
                };
                let top = crate::numerics::hstack(&[b.block(k).clone(), x.block(k).adjoint()], n)?;
                let bottom = crate::numerics::hstack(&[y.block(k).clone(), ak], d)?;
                vstack(&[top, bottom], n + d)
            })
            .collect::<Result<Vec<_>>>()?;
        AlgElement::new(shape, blocks)
    }
}
