//! `B`-valued positive definite kernels on finite sets and their Kolmogorov
//! decompositions.

use crate::algebra::{AlgElement, AlgebraShape};
use crate::error::{Error, Result};
use crate::modcorr::{AdjointableOp, HilbertModule, ModVector};
use crate::numerics::{hstack, isometry_residual, psd_factor, psd_witness, solve_on_generators, zeros, CMatrix, Tolerance};

pub const DEFAULT_MAX_POINTS: usize = 16;

/// Kernel `S x S → B`, entries stored row-major over `points`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpKernel {
    points: Vec<String>,
    shape: AlgebraShape,
    entries: Vec<AlgElement>,
}

/// Outcome of a positivity test on a family of block matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub holds: bool,
    pub min_eigenvalue: f64,
    /// Block attaining `min_eigenvalue`.
    pub block: usize,
    pub threshold: f64,
}

impl Witness {
    pub(crate) fn from_blocks(blocks: &[CMatrix], tol: &Tolerance) -> Result<Self> {
        let mut out = Witness {
            holds: true,
            min_eigenvalue: f64::INFINITY,
            block: 0,
            threshold: tol.abs_floor,
        };
        for (k, b) in blocks.iter().enumerate() {
            if b.nrows() == 0 {
                continue;
            }
            let w = psd_witness(b, tol)?;
            if !w.is_psd() {
                out.holds = false;
            }
            if w.min_eigenvalue < out.min_eigenvalue {
                out.min_eigenvalue = w.min_eigenvalue;
                out.block = k;
                out.threshold = w.threshold;
            }
        }
        if out.min_eigenvalue == f64::INFINITY {
            out.min_eigenvalue = 0.0;
        }
        Ok(out)
    }
}

impl OpKernel {
    /// Validates completeness and hermiticity, then replaces each entry by
    /// `(k(σ,σ') + k(σ',σ)*)/2`.
    pub fn new(points: Vec<String>, shape: AlgebraShape, entries: Vec<AlgElement>, tol: &Tolerance) -> Result<Self> {
        let n = points.len();
        if entries.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for {n} points",
                entries.len()
            )));
        }
        if entries.iter().any(|e| e.shape() != &shape) {
            return Err(Error::ShapeMismatch("kernel entries of mixed shape".into()));
        }
        let mut seen = std::collections::HashSet::new();
        if !points.iter().all(|p| seen.insert(p)) {
            return Err(Error::Validation("duplicate point label".into()));
        }
        let scale = entries.iter().map(|e| e.norm()).fold(0.0, f64::max);
        let threshold = tol.threshold(scale);
        let mut worst = 0.0f64;
        for s in 0..n {
            for t in 0..n {
                let d = entries[s * n + t]
                    .adjoint()
                    .max_diff(&entries[t * n + s])?;
                worst = worst.max(d);
            }
        }
        if worst > threshold {
            return Err(Error::NotHermitianKernel(worst));
        }
        let sym = (0..n * n)
            .map(|idx| {
                let (s, t) = (idx / n, idx % n);
                entries[idx]
                    .add(&entries[t * n + s].adjoint())
                    .map(|e| e.scale(crate::numerics::re(0.5)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            points,
            shape,
            entries: sym,
        })
    }

    pub fn from_fn(
        points: Vec<String>,
        shape: AlgebraShape,
        f: impl Fn(usize, usize) -> AlgElement,
        tol: &Tolerance,
    ) -> Result<Self> {
        let n = points.len();
        let entries = (0..n * n).map(|i| f(i / n, i % n)).collect();
        Self::new(points, shape, entries, tol)
    }

    /// Scalar kernel from a Hermitian matrix.
    pub fn scalar(matrix: &CMatrix, tol: &Tolerance) -> Result<Self> {
        let n = matrix.nrows();
        let shape = AlgebraShape::scalars();
        Self::from_fn(
            default_labels(n),
            shape.clone(),
            |s, t| AlgElement::new(shape.clone(), vec![CMatrix::from_element(1, 1, matrix[(s, t)])]).expect("1x1"),
            tol,
        )
    }

    /// `k(σ,σ') = ⟨x_σ, x_σ'⟩`.
    pub fn gram(points: Vec<String>, vectors: &[ModVector], tol: &Tolerance) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::ShapeMismatch("no vectors".into()))?;
        let shape = first.module().shape().clone();
        let n = vectors.len();
        let mut entries = Vec::with_capacity(n * n);
        for x in vectors {
            for y in vectors {
                entries.push(x.inner(y)?);
            }
        }
        Self::new(points, shape, entries, tol)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn entries(&self) -> &[AlgElement] {
        &self.entries
    }

    pub fn entry(&self, s: usize, t: usize) -> &AlgElement {
        &self.entries[s * self.points.len() + t]
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn check_cap(&self, max_points: usize) -> Result<()> {
        if self.points.len() > max_points {
            return Err(Error::CapExceeded {
                what: "points".into(),
                cap: max_points,
            });
        }
        Ok(())
    }

    /// The `|S| n_k x |S| n_k` matrix `[k(σ,σ')_k]`.
    pub fn gram_block(&self, k: usize) -> CMatrix {
        let n = self.points.len();
        let nk = self.shape.block(k);
        let mut g = zeros(n * nk, n * nk);
        for s in 0..n {
            for t in 0..n {
                g.view_mut((s * nk, t * nk), (nk, nk))
                    .copy_from(self.entry(s, t).block(k));
            }
        }
        g
    }

    pub fn is_pd(&self, tol: &Tolerance) -> Result<Witness> {
        let blocks: Vec<CMatrix> = (0..self.shape.num_blocks()).map(|k| self.gram_block(k)).collect();
        Witness::from_blocks(&blocks, tol)
    }

    /// Minimal Kolmogorov decomposition: per block, `G_k = L_k* L_k` and
    /// `i(σ)_k` is the `σ`-th column slice of `L_k`.
    pub fn kolmogorov(&self, tol: &Tolerance) -> Result<Decomposition> {
        let n = self.points.len();
        let mut factors = Vec::with_capacity(self.shape.num_blocks());
        for k in 0..self.shape.num_blocks() {
            let f = psd_factor(&self.gram_block(k), tol).map_err(|e| match e {
                Error::NotPsd { eigenvalue } => Error::NotPd { eigenvalue },
                other => other,
            })?;
            factors.push(f.factor);
        }
        let module = HilbertModule::new(self.shape.clone(), factors.iter().map(|f| f.nrows()).collect())?;
        let point_map = (0..n)
            .map(|s| {
                let blocks = factors
                    .iter()
                    .enumerate()
                    .map(|(k, l)| {
                        let nk = self.shape.block(k);
                        l.columns(s * nk, nk).into_owned()
                    })
                    .collect();
                ModVector::new(module.clone(), blocks)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Decomposition {
            module,
            point_map,
            minimal: true,
        })
    }
}

pub fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

/// A pair `(E, i)` with `⟨i(σ), i(σ')⟩ = k(σ, σ')`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub module: HilbertModule,
    pub point_map: Vec<ModVector>,
    pub minimal: bool,
}

impl Decomposition {
    pub fn new(module: HilbertModule, point_map: Vec<ModVector>, minimal: bool) -> Result<Self> {
        for x in &point_map {
            module.expect_same(x.module())?;
        }
        Ok(Self {
            module,
            point_map,
            minimal,
        })
    }

    /// Largest entry deviation of `⟨i(σ), i(σ')⟩` from the kernel.
    pub fn reconstruction_error(&self, k: &OpKernel) -> Result<f64> {
        let n = k.len();
        if self.point_map.len() != n {
            return Err(Error::PointSetMismatch);
        }
        let mut worst = 0.0f64;
        for s in 0..n {
            for t in 0..n {
                let g = self.point_map[s].inner(&self.point_map[t])?;
                worst = worst.max(g.max_diff(k.entry(s, t))?);
            }
        }
        Ok(worst)
    }

    /// `[⟨i(σ), i(σ')⟩]` as a kernel with the given labels.
    pub fn kernel(&self, points: Vec<String>, tol: &Tolerance) -> Result<OpKernel> {
        OpKernel::gram(points, &self.point_map, tol)
    }

    /// Per block, the generators `i(σ)_k` side by side.
    fn generator_blocks(&self) -> Result<Vec<CMatrix>> {
        (0..self.module.ambient().len())
            .map(|k| {
                let parts: Vec<CMatrix> = self.point_map.iter().map(|x| x.block(k).clone()).collect();
                hstack(&parts, self.module.ambient()[k])
            })
            .collect()
    }
}

/// The isometry `v` with `v i(σ) = j(σ)`, solved on the generators
/// `i(σ) b` and validated.
pub fn universal_isometry(from: &Decomposition, to: &Decomposition, tol: &Tolerance) -> Result<AdjointableOp> {
    if from.point_map.len() != to.point_map.len() {
        return Err(Error::PointSetMismatch);
    }
    if from.module.shape() != to.module.shape() {
        return Err(Error::ShapeMismatch("decompositions over different algebras".into()));
    }
    let n = from.point_map.len();
    let mut mismatch = 0.0f64;
    let mut scale = 0.0f64;
    for s in 0..n {
        for t in 0..n {
            let a = from.point_map[s].inner(&from.point_map[t])?;
            let b = to.point_map[s].inner(&to.point_map[t])?;
            scale = scale.max(a.norm());
            mismatch = mismatch.max(a.max_diff(&b)?);
        }
    }
    let limit = tol.rel_eps * (1.0 + scale);
    if mismatch > limit {
        return Err(Error::KernelMismatch(mismatch));
    }
    let src = from.generator_blocks()?;
    let dst = to.generator_blocks()?;
    let mut blocks = Vec::with_capacity(src.len());
    for (s, d) in src.iter().zip(&dst) {
        let (x, residual) = solve_on_generators(s, d, tol)?;
        if residual > limit {
            return Err(Error::KernelMismatch(residual));
        }
        blocks.push(x);
    }
    let v = AdjointableOp::new(from.module.clone(), to.module.clone(), blocks)?;
    if from.minimal {
        let res = v.blocks().iter().map(isometry_residual).fold(0.0, f64::max);
        if res > limit {
            return Err(Error::KernelMismatch(res));
        }
    }
    Ok(v)
}
