use crate::algebra::{AlgElement, AlgebraShape};
use crate::error::{Error, Result};
use crate::numerics::{
    hstack, identity, isometry_residual, matrix_unit, max_abs, range_basis, vstack, zeros, CMatrix,
    Tolerance, C64,
};

/// Concrete Hilbert `B`-module `⊕_k Hom(ℂ^{n_k}, ℂ^{d_k})` with inner product
/// `⟨x, y⟩_k = x_k* y_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertModule {
    shape: AlgebraShape,
    ambient: Vec<usize>,
}

impl HilbertModule {
    pub fn new(shape: AlgebraShape, ambient: Vec<usize>) -> Result<Self> {
        if ambient.len() != shape.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} ambient dimensions for {} algebra blocks",
                ambient.len(),
                shape.num_blocks()
            )));
        }
        Ok(Self { shape, ambient })
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        Self {
            shape: shape.clone(),
            ambient: vec![0; shape.num_blocks()],
        }
    }

    /// `B` as a module over itself.
    pub fn trivial(shape: &AlgebraShape) -> Self {
        Self {
            shape: shape.clone(),
            ambient: shape.blocks().to_vec(),
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn ambient(&self) -> &[usize] {
        &self.ambient
    }

    /// Complex vector-space dimension `Σ d_k n_k`.
    pub fn dim(&self) -> usize {
        self.ambient
            .iter()
            .zip(self.shape.blocks())
            .map(|(d, n)| d * n)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.ambient.iter().all(|&d| d == 0)
    }

    /// Vector-space basis: block matrix units, block by block, row-major.
    pub fn basis(&self) -> Vec<ModVector> {
        let mut out = Vec::with_capacity(self.dim());
        for (k, (&d, &n)) in self.ambient.iter().zip(self.shape.blocks()).enumerate() {
            for i in 0..d {
                for j in 0..n {
                    let mut v = ModVector::zero(self);
                    v.blocks[k][(i, j)] = crate::numerics::ONE;
                    out.push(v);
                }
            }
        }
        out
    }

    pub(crate) fn expect_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch(format!(
                "module {:?}/{:?} vs {:?}/{:?}",
                self.shape.blocks(),
                self.ambient,
                other.shape.blocks(),
                other.ambient
            )));
        }
        Ok(())
    }
}

/// Element of a [`HilbertModule`]; block `k` is a `d_k x n_k` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ModVector {
    module: HilbertModule,
    blocks: Vec<CMatrix>,
}

impl ModVector {
    pub fn new(module: HilbertModule, blocks: Vec<CMatrix>) -> Result<Self> {
        let ok = blocks.len() == module.ambient.len()
            && blocks
                .iter()
                .zip(module.ambient.iter().zip(module.shape.blocks()))
                .all(|(b, (&d, &n))| b.shape() == (d, n));
        if !ok {
            return Err(Error::ShapeMismatch(
                "vector blocks do not match module".into(),
            ));
        }
        Ok(Self { module, blocks })
    }

    /// Coordinates in the basis of [`HilbertModule::basis`].
    pub fn coords(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.module.dim());
        for b in &self.blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    out.push(b[(i, j)]);
                }
            }
        }
        out
    }

    pub fn from_coords(module: &HilbertModule, coords: &[C64]) -> Result<Self> {
        if coords.len() != module.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} coordinates for a module of dimension {}",
                coords.len(),
                module.dim()
            )));
        }
        let mut it = coords.iter().copied();
        let blocks = module
            .ambient
            .iter()
            .zip(module.shape.blocks())
            .map(|(&d, &n)| {
                let mut m = zeros(d, n);
                for i in 0..d {
                    for j in 0..n {
                        m[(i, j)] = it.next().expect("length checked");
                    }
                }
                m
            })
            .collect();
        Ok(Self {
            module: module.clone(),
            blocks,
        })
    }

    pub fn zero(module: &HilbertModule) -> Self {
        let blocks = module
            .ambient
            .iter()
            .zip(module.shape.blocks())
            .map(|(&d, &n)| zeros(d, n))
            .collect();
        Self {
            module: module.clone(),
            blocks,
        }
    }

    /// The element `b` of `B` viewed in the trivial module `B_B`.
    pub fn from_element(b: &AlgElement) -> Self {
        Self {
            module: HilbertModule::trivial(b.shape()),
            blocks: b.blocks().to_vec(),
        }
    }

    pub fn module(&self) -> &HilbertModule {
        &self.module
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMatrix {
        &self.blocks[k]
    }

    /// B-valued inner product `⟨self, other⟩`.
    pub fn inner(&self, other: &Self) -> Result<AlgElement> {
        self.module.expect_same(&other.module)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(x, y)| x.adjoint() * y)
            .collect();
        AlgElement::new(self.module.shape.clone(), blocks)
    }

    /// Right module action `x b`.
    pub fn right_mul(&self, b: &AlgElement) -> Result<Self> {
        if b.shape() != self.module.shape() {
            return Err(Error::ShapeMismatch("right action by a foreign algebra".into()));
        }
        Ok(Self {
            module: self.module.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(b.blocks())
                .map(|(x, bk)| x * bk)
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.module.expect_same(&other.module)?;
        Ok(Self {
            module: self.module.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(x, y)| x + y)
                .collect(),
        })
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            module: self.module.clone(),
            blocks: self.blocks.iter().map(|x| x * z).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(max_abs).fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        self.module.expect_same(&other.module)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(x, y)| max_abs(&(x - y)))
            .fold(0.0, f64::max))
    }

    /// Norm `sqrt(||⟨x, x⟩||)`.
    pub fn norm(&self) -> f64 {
        self.inner(self).map(|g| g.norm().sqrt()).unwrap_or(0.0)
    }
}

/// Blockwise operator between modules over the same algebra; block `k` maps
/// `ℂ^{d_k}` to `ℂ^{d'_k}`. Adjointable by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointableOp {
    domain: HilbertModule,
    codomain: HilbertModule,
    blocks: Vec<CMatrix>,
}

impl AdjointableOp {
    pub fn new(domain: HilbertModule, codomain: HilbertModule, blocks: Vec<CMatrix>) -> Result<Self> {
        if domain.shape != codomain.shape {
            return Err(Error::ShapeMismatch(
                "adjointable operators need a common right algebra".into(),
            ));
        }
        let ok = blocks.len() == domain.ambient.len()
            && blocks
                .iter()
                .zip(domain.ambient.iter().zip(&codomain.ambient))
                .all(|(b, (&d, &e))| b.shape() == (e, d));
        if !ok {
            return Err(Error::ShapeMismatch("operator blocks do not match".into()));
        }
        Ok(Self {
            domain,
            codomain,
            blocks,
        })
    }

    pub fn identity(module: &HilbertModule) -> Self {
        Self {
            domain: module.clone(),
            codomain: module.clone(),
            blocks: module.ambient.iter().map(|&d| identity(d)).collect(),
        }
    }

    pub fn domain(&self) -> &HilbertModule {
        &self.domain
    }

    pub fn codomain(&self) -> &HilbertModule {
        &self.codomain
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn apply(&self, x: &ModVector) -> Result<ModVector> {
        self.domain.expect_same(&x.module)?;
        Ok(ModVector {
            module: self.codomain.clone(),
            blocks: self.blocks.iter().zip(&x.blocks).map(|(t, v)| t * v).collect(),
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.domain.expect_same(&other.codomain)?;
        Ok(Self {
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect(),
        })
    }

    /// `max_abs(V*V - I)` over all blocks.
    pub fn isometry_residual(&self) -> f64 {
        self.blocks.iter().map(isometry_residual).fold(0.0, f64::max)
    }

    /// `max_abs(V V* - I)` over all blocks.
    pub fn coisometry_residual(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| isometry_residual(&b.adjoint()))
            .fold(0.0, f64::max)
    }

    pub fn max_diff(&self, other: &Self) -> Result<f64> {
        self.domain.expect_same(&other.domain)?;
        self.codomain.expect_same(&other.codomain)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| max_abs(&(a - b)))
            .fold(0.0, f64::max))
    }
}

/// Result of re-coordinatizing the span of generators.
#[derive(Debug, Clone)]
pub struct Submodule {
    pub module: HilbertModule,
    /// Isometric inclusion into the original module.
    pub inclusion: AdjointableOp,
    /// The generators expressed in `module`.
    pub coordinates: Vec<ModVector>,
}

/// The submodule `span(vectors · B)` with minimal ambient dimensions.
pub fn submodule_from_generators(
    module: &HilbertModule,
    vectors: &[ModVector],
    tol: &Tolerance,
) -> Result<Submodule> {
    for v in vectors {
        module.expect_same(&v.module)?;
    }
    let mut isos = Vec::with_capacity(module.ambient.len());
    for (k, &d) in module.ambient.iter().enumerate() {
        let cols: Vec<CMatrix> = vectors.iter().map(|v| v.blocks[k].clone()).collect();
        let stacked = hstack(&cols, d)?;
        isos.push(range_basis(&stacked, tol)?);
    }
    let sub = HilbertModule {
        shape: module.shape.clone(),
        ambient: isos.iter().map(|v| v.ncols()).collect(),
    };
    let coordinates = vectors
        .iter()
        .map(|v| ModVector {
            module: sub.clone(),
            blocks: v
                .blocks
                .iter()
                .zip(&isos)
                .map(|(x, iso)| iso.adjoint() * x)
                .collect(),
        })
        .collect();
    Ok(Submodule {
        inclusion: AdjointableOp {
            domain: sub.clone(),
            codomain: module.clone(),
            blocks: isos,
        },
        module: sub,
        coordinates,
    })
}

/// `E_1 ⊕ ... ⊕ E_m` with the canonical isometric embeddings.
pub fn direct_sum(modules: &[HilbertModule]) -> Result<(HilbertModule, Vec<AdjointableOp>)> {
    let first = modules
        .first()
        .ok_or_else(|| Error::ShapeMismatch("direct sum of no modules".into()))?;
    for m in modules {
        if m.shape != first.shape {
            return Err(Error::ShapeMismatch(
                "direct summands over different algebras".into(),
            ));
        }
    }
    let nb = first.ambient.len();
    let ambient: Vec<usize> = (0..nb)
        .map(|k| modules.iter().map(|m| m.ambient[k]).sum())
        .collect();
    let sum = HilbertModule {
        shape: first.shape.clone(),
        ambient: ambient.clone(),
    };
    let mut offsets = vec![0usize; nb];
    let embeddings = modules
        .iter()
        .map(|m| {
            let blocks = (0..nb)
                .map(|k| {
                    let mut b = zeros(ambient[k], m.ambient[k]);
                    b.view_mut((offsets[k], 0), (m.ambient[k], m.ambient[k]))
                        .copy_from(&identity(m.ambient[k]));
                    offsets[k] += m.ambient[k];
                    b
                })
                .collect();
            AdjointableOp {
                domain: m.clone(),
                codomain: sum.clone(),
                blocks,
            }
        })
        .collect();
    Ok((sum, embeddings))
}

/// Tuple `(x_1, ..., x_m)` as an element of the direct sum of their modules.
pub fn direct_sum_vector(xs: &[ModVector]) -> Result<ModVector> {
    let modules: Vec<HilbertModule> = xs.iter().map(|x| x.module.clone()).collect();
    let (sum, _) = direct_sum(&modules)?;
    let blocks = (0..sum.ambient.len())
        .map(|k| {
            let parts: Vec<CMatrix> = xs.iter().map(|x| x.blocks[k].clone()).collect();
            vstack(&parts, sum.shape.block(k))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModVector { module: sum, blocks })
}

/// Column space `E^n`.
pub fn column_space(module: &HilbertModule, n: usize) -> Result<HilbertModule> {
    if n == 0 {
        return Ok(HilbertModule::zero(&module.shape));
    }
    Ok(direct_sum(&vec![module.clone(); n])?.0)
}

/// Row space `E_n`, a module over `M_n(B) = ⊕_k M_{n n_k}`.
pub fn row_space(module: &HilbertModule, n: usize) -> Result<HilbertModule> {
    HilbertModule::new(module.shape.amplify(n)?, module.ambient.clone())
}

/// `(x_1, ..., x_n)` as an element of the row space.
pub fn row_vector(xs: &[ModVector]) -> Result<ModVector> {
    let first = xs
        .first()
        .ok_or_else(|| Error::ShapeMismatch("empty row".into()))?;
    for x in xs {
        first.module.expect_same(&x.module)?;
    }
    let target = row_space(&first.module, xs.len())?;
    let blocks = (0..target.ambient.len())
        .map(|k| {
            let parts: Vec<CMatrix> = xs.iter().map(|x| x.blocks[k].clone()).collect();
            hstack(&parts, target.ambient[k])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModVector {
        module: target,
        blocks,
    })
}

/// The `M_n(B)` element `[b_ij]` from its entries (row-major `n x n` grid).
pub fn matrix_element(shape: &AlgebraShape, n: usize, entries: &[AlgElement]) -> Result<AlgElement> {
    if entries.len() != n * n {
        return Err(Error::ShapeMismatch(format!(
            "{} entries for a {n}x{n} matrix",
            entries.len()
        )));
    }
    let big = shape.amplify(n)?;
    let blocks = shape
        .blocks()
        .iter()
        .enumerate()
        .map(|(k, &nk)| {
            let mut m = zeros(n * nk, n * nk);
            for i in 0..n {
                for j in 0..n {
                    m.view_mut((i * nk, j * nk), (nk, nk))
                        .copy_from(entries[i * n + j].block(k));
                }
            }
            m
        })
        .collect();
    AlgElement::new(big, blocks)
}

/// The `M_m(B)` Gram element `[⟨x_i, x_j⟩]`.
pub fn gram_element(xs: &[ModVector]) -> Result<AlgElement> {
    let first = xs
        .first()
        .ok_or_else(|| Error::ShapeMismatch("empty family".into()))?;
    let mut entries = Vec::with_capacity(xs.len() * xs.len());
    for x in xs {
        for y in xs {
            entries.push(x.inner(y)?);
        }
    }
    matrix_element(first.module.shape(), xs.len(), &entries)
}

/// Unit vector of `B_B` at a matrix unit; handy for generator sets.
pub fn trivial_unit_vector(shape: &AlgebraShape, u: usize) -> ModVector {
    let (k, i, j) = shape.unit_position(u);
    let mut v = ModVector::zero(&HilbertModule::trivial(shape));
    v.blocks[k] = matrix_unit(shape.block(k), i, j);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{psd_witness, ONE};
    use crate::random::{random_cmatrix, seeded, Prng};

    pub(crate) fn random_vector(rng: &mut Prng, m: &HilbertModule) -> ModVector {
        let blocks = m
            .ambient()
            .iter()
            .zip(m.shape().blocks())
            .map(|(&d, &n)| random_cmatrix(rng, d, n))
            .collect();
        ModVector::new(m.clone(), blocks).unwrap()
    }

    fn random_element(rng: &mut Prng, s: &AlgebraShape) -> AlgElement {
        let blocks = s.blocks().iter().map(|&n| random_cmatrix(rng, n, n)).collect();
        AlgElement::new(s.clone(), blocks).unwrap()
    }

    fn module(blocks: &[usize], ambient: &[usize]) -> HilbertModule {
        HilbertModule::new(AlgebraShape::new(blocks.to_vec()).unwrap(), ambient.to_vec()).unwrap()
    }

    #[test]
    fn inner_of_basis_column_is_matrix_unit() {
        let m = module(&[2], &[1]);
        let mut x = ModVector::zero(&m);
        x.blocks[0][(0, 0)] = ONE;
        let g = x.inner(&x).unwrap();
        assert_eq!(g.block(0), &matrix_unit(2, 0, 0));
    }

    #[test]
    fn inner_is_right_linear_and_hermitian() {
        let mut rng = seeded(21);
        let m = module(&[2, 3], &[3, 1]);
        for _ in 0..20 {
            let x = random_vector(&mut rng, &m);
            let y = random_vector(&mut rng, &m);
            let b = random_element(&mut rng, m.shape());
            let lhs = x.inner(&y.right_mul(&b).unwrap()).unwrap();
            let rhs = x.inner(&y).unwrap().mul(&b).unwrap();
            assert!(lhs.max_diff(&rhs).unwrap() < 1e-12);
            let xy = x.inner(&y).unwrap();
            assert!(xy.adjoint().max_diff(&y.inner(&x).unwrap()).unwrap() < 1e-12);
            assert!(x.inner(&x).unwrap().is_positive(&Tolerance::default()).positive);
        }
    }

    #[test]
    fn cauchy_schwarz() {
        let mut rng = seeded(22);
        let m = module(&[2, 2], &[2, 3]);
        for _ in 0..50 {
            let x = random_vector(&mut rng, &m);
            let y = random_vector(&mut rng, &m);
            let xy = x.inner(&y).unwrap();
            let lhs = xy.mul(&xy.adjoint()).unwrap().norm();
            let rhs = y.inner(&y).unwrap().norm() * x.inner(&x).unwrap().norm();
            assert!(lhs <= rhs * (1.0 + 1e-12));
            // operator form: ⟨x,y⟩⟨y,x⟩ ≤ ||⟨y,y⟩|| ⟨x,x⟩
            let gap = x
                .inner(&x)
                .unwrap()
                .scale(crate::numerics::re(y.inner(&y).unwrap().norm()))
                .sub(&xy.mul(&xy.adjoint()).unwrap())
                .unwrap();
            assert!(gap.is_positive(&Tolerance::default()).positive);
        }
    }

    #[test]
    fn zero_generators_give_zero_module() {
        let m = module(&[2, 1], &[3, 2]);
        let s = submodule_from_generators(&m, &[ModVector::zero(&m)], &Tolerance::default()).unwrap();
        assert!(s.module.is_zero());
    }

    #[test]
    fn identity_generator_spans_everything() {
        let shape = AlgebraShape::new(vec![3]).unwrap();
        let x = ModVector::from_element(&AlgElement::unit(&shape));
        let s = submodule_from_generators(x.module(), std::slice::from_ref(&x), &Tolerance::default()).unwrap();
        assert_eq!(s.module.ambient(), &[3]);
    }

    #[test]
    fn submodule_preserves_inner_products() {
        let mut rng = seeded(23);
        let m = module(&[2, 2], &[6, 5]);
        let gens: Vec<ModVector> = (0..2).map(|_| random_vector(&mut rng, &m)).collect();
        let s = submodule_from_generators(&m, &gens, &Tolerance::default()).unwrap();
        assert_eq!(s.module.ambient(), &[4, 4]);
        assert!(s.inclusion.isometry_residual() < 1e-12);
        for (a, ca) in gens.iter().zip(&s.coordinates) {
            for (b, cb) in gens.iter().zip(&s.coordinates) {
                let d = a.inner(b).unwrap().max_diff(&ca.inner(cb).unwrap()).unwrap();
                assert!(d < 1e-10);
            }
            assert!(s.inclusion.apply(ca).unwrap().max_diff(a).unwrap() < 1e-10);
        }
    }

    #[test]
    fn direct_sum_with_zero() {
        let mut rng = seeded(24);
        let m = module(&[2], &[3]);
        let z = HilbertModule::zero(m.shape());
        let (sum, emb) = direct_sum(&[m.clone(), z]).unwrap();
        assert_eq!(sum, m);
        let x = random_vector(&mut rng, &m);
        let y = emb[0].apply(&x).unwrap();
        assert!(y.inner(&y).unwrap().max_diff(&x.inner(&x).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn direct_sum_inner_is_sum() {
        let mut rng = seeded(25);
        let a = module(&[2, 1], &[1, 2]);
        let b = module(&[2, 1], &[3, 0]);
        let (x1, x2) = (random_vector(&mut rng, &a), random_vector(&mut rng, &b));
        let (y1, y2) = (random_vector(&mut rng, &a), random_vector(&mut rng, &b));
        let x = direct_sum_vector(&[x1.clone(), x2.clone()]).unwrap();
        let y = direct_sum_vector(&[y1.clone(), y2.clone()]).unwrap();
        let expect = x1.inner(&y1).unwrap().add(&x2.inner(&y2).unwrap()).unwrap();
        assert!(x.inner(&y).unwrap().max_diff(&expect).unwrap() < 1e-13);
    }

    #[test]
    fn column_space_of_scalars() {
        let c = HilbertModule::trivial(&AlgebraShape::scalars());
        assert_eq!(column_space(&c, 4).unwrap().ambient(), &[4]);
    }

    #[test]
    fn row_space_inner_and_action() {
        let mut rng = seeded(26);
        let m = module(&[2, 1], &[3, 2]);
        let n = 3;
        let xs: Vec<ModVector> = (0..n).map(|_| random_vector(&mut rng, &m)).collect();
        let ys: Vec<ModVector> = (0..n).map(|_| random_vector(&mut rng, &m)).collect();
        let x = row_vector(&xs).unwrap();
        let y = row_vector(&ys).unwrap();
        let ip = x.inner(&y).unwrap();
        let entries: Vec<AlgElement> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| xs[i].inner(&ys[j]).unwrap())
            .collect();
        let expect = matrix_element(m.shape(), n, &entries).unwrap();
        assert!(ip.max_diff(&expect).unwrap() < 1e-12);
        // (X B)_i = Σ_j x_j b_ji
        let bs: Vec<AlgElement> = (0..n * n).map(|_| random_element(&mut rng, m.shape())).collect();
        let big = matrix_element(m.shape(), n, &bs).unwrap();
        let xb = x.right_mul(&big).unwrap();
        for i in 0..n {
            let mut acc = ModVector::zero(&m);
            for j in 0..n {
                acc = acc.add(&xs[j].right_mul(&bs[j * n + i]).unwrap()).unwrap();
            }
            let expect = row_vector(&[acc]).unwrap();
            for k in 0..2 {
                let nk = m.shape().block(k);
                let got = xb.block(k).columns(i * nk, nk).into_owned();
                assert!(max_abs(&(got - expect.block(k))) < 1e-12);
            }
        }
    }

    #[test]
    fn gram_blocks_are_positive() {
        let mut rng = seeded(27);
        let m = module(&[2, 3], &[2, 1]);
        for _ in 0..30 {
            let xs: Vec<ModVector> = (0..4).map(|_| random_vector(&mut rng, &m)).collect();
            let g = gram_element(&xs).unwrap();
            for b in g.blocks() {
                let w = psd_witness(b, &Tolerance::default()).unwrap();
                assert!(w.is_psd(), "{w:?}");
            }
        }
    }
}
