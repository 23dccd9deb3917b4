use crate::algebra::{AlgElement, AlgebraShape};
use crate::error::{Error, Result};
use crate::modcorr::{tensor, AdjointableOp, Correspondence, HilbertModule, ModVector, Representation, TensorMap};
use crate::numerics::{hstack, max_abs, psd_factor, solve_on_generators, zeros, CMatrix, Tolerance};

use super::maps::{schur_compose, MapKernel};

pub const DEFAULT_MAX_GENERATORS: usize = 4096;

/// GNS correspondence `(E, i)` of a CPD kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct GnsData {
    pub corr: Correspondence,
    pub point_map: Vec<ModVector>,
    pub minimal: bool,
}

impl GnsData {
    pub fn new(corr: Correspondence, point_map: Vec<ModVector>, minimal: bool) -> Result<Self> {
        for x in &point_map {
            corr.module().expect_same(x.module())?;
        }
        Ok(Self {
            corr,
            point_map,
            minimal,
        })
    }

    /// The kernel `⟨i(σ), a i(σ')⟩`.
    pub fn kernel(&self, points: Vec<String>, tol: &Tolerance) -> Result<MapKernel> {
        MapKernel::from_correspondence(points, &self.corr, &self.point_map, tol)
    }

    /// Largest deviation of `⟨i(σ), a i(σ')⟩` from `K^{σ,σ'}(a)` over matrix
    /// units `a`.
    pub fn reconstruction_error(&self, k: &MapKernel) -> Result<f64> {
        if k.len() != self.point_map.len() {
            return Err(Error::PointSetMismatch);
        }
        let a = self.corr.left();
        if a != k.from_shape() || self.corr.right() != k.to_shape() {
            return Err(Error::ShapeMismatch("kernel and correspondence differ".into()));
        }
        let mut worst = 0.0f64;
        for u in 0..a.dim() {
            let op = self.corr.left_op(&AlgElement::matrix_unit(a, u))?;
            let moved: Vec<ModVector> = self
                .point_map
                .iter()
                .map(|y| op.apply(y))
                .collect::<Result<Vec<_>>>()?;
            for (s, x) in self.point_map.iter().enumerate() {
                for (t, y) in moved.iter().enumerate() {
                    let got = x.inner(y)?;
                    worst = worst.max(got.max_diff(&k.entry(s, t).apply_unit(u))?);
                }
            }
        }
        Ok(worst)
    }

    /// Per right block, the generators `E_u i(σ)` over matrix units `u` and
    /// points `σ`, side by side.
    pub(crate) fn cyclic_generators(&self) -> Result<Vec<CMatrix>> {
        let a = self.corr.left();
        let module = self.corr.module();
        (0..module.ambient().len())
            .map(|l| {
                let rep = &self.corr.reps()[l];
                let mut parts = Vec::with_capacity(a.dim() * self.point_map.len());
                for u in 0..a.dim() {
                    for x in &self.point_map {
                        parts.push(&rep.units()[u] * x.block(l));
                    }
                }
                hstack(&parts, module.ambient()[l])
            })
            .collect()
    }
}

/// Number of generators `a ⊗ e_σ ⊗ b` the GNS construction factors.
pub fn gns_generator_count(k: &MapKernel) -> usize {
    k.from_shape().dim() * k.len() * k.to_shape().blocks().iter().sum::<usize>()
}

/// GNS construction: per right block `k`, the scalar Gram of the generators
/// `E_u ⊗ e_σ ⊗ (column p)` is factored as `L_k* L_k`; the left action is
/// read off from `E_v L_k = L'_k`.
pub fn gns(kernel: &MapKernel, tol: &Tolerance) -> Result<GnsData> {
    let w = kernel.is_cpd(tol)?;
    if !w.holds {
        return Err(Error::NotCpd {
            eigenvalue: w.min_eigenvalue,
        });
    }
    let a = kernel.from_shape();
    let b = kernel.to_shape();
    let n = kernel.len();
    let units: Vec<(usize, usize, usize)> = a.units().collect();
    let mut factors = Vec::with_capacity(b.num_blocks());
    for k in 0..b.num_blocks() {
        let nk = b.block(k);
        let size = a.dim() * n * nk;
        let mut g = zeros(size, size);
        for (u, &(j, i, l)) in units.iter().enumerate() {
            for (v, &(j2, i2, l2)) in units.iter().enumerate() {
                // E_u* E_v = E_{l i} E_{i2 l2}
                if j != j2 || i != i2 {
                    continue;
                }
                let prod = a.unit_index(j, l, l2);
                for s in 0..n {
                    for t in 0..n {
                        let img = kernel.entry(s, t).apply_unit(prod);
                        let r0 = (u * n + s) * nk;
                        let c0 = (v * n + t) * nk;
                        g.view_mut((r0, c0), (nk, nk)).copy_from(img.block(k));
                    }
                }
            }
        }
        let f = psd_factor(&g, tol).map_err(|e| match e {
            Error::NotPsd { eigenvalue } => Error::NotCpd { eigenvalue },
            other => other,
        })?;
        factors.push(f);
    }
    let module = HilbertModule::new(b.clone(), factors.iter().map(|f| f.rank()).collect())?;
    // left action: E_w maps the generator column (v, σ, p) to (w v, σ, p)
    let mut reps = Vec::with_capacity(b.num_blocks());
    for (k, f) in factors.iter().enumerate() {
        let nk = b.block(k);
        let rinv = f.right_inverse();
        let cols = a.dim() * n * nk;
        let mut rep_units = Vec::with_capacity(a.dim());
        for &(j, i, l) in &units {
            let mut moved = zeros(f.rank(), cols);
            for (v, &(j2, i2, l2)) in units.iter().enumerate() {
                if j != j2 || l != i2 {
                    continue;
                }
                let target = a.unit_index(j, i, l2);
                for s in 0..n {
                    let src = (target * n + s) * nk;
                    let dst = (v * n + s) * nk;
                    moved
                        .columns_mut(dst, nk)
                        .copy_from(&f.factor.columns(src, nk));
                }
            }
            rep_units.push(moved * &rinv);
        }
        reps.push(Representation::unchecked(a.clone(), f.rank(), rep_units)?);
    }
    let corr = Correspondence::new(module.clone(), a.clone(), reps)?;
    // i(σ) = Σ_j Σ_i (E^{(j)}_ii ⊗ e_σ)
    let point_map = (0..n)
        .map(|s| {
            let blocks = factors
                .iter()
                .enumerate()
                .map(|(k, f)| {
                    let nk = b.block(k);
                    let mut x = zeros(f.rank(), nk);
                    for (jj, &p) in a.blocks().iter().enumerate() {
                        for i in 0..p {
                            let u = a.unit_index(jj, i, i);
                            x += f.factor.columns((u * n + s) * nk, nk);
                        }
                    }
                    x
                })
                .collect();
            ModVector::new(module.clone(), blocks)
        })
        .collect::<Result<Vec<_>>>()?;
    GnsData::new(corr, point_map, true)
}

/// The isometry `GNS(L ∘ K) → GNS(K) ⊙ GNS(L)` sending the cyclic vectors
/// to `i(σ) ⊙ j(σ)`, with its validation data.
#[derive(Debug, Clone)]
pub struct ComposeEmbedding {
    pub composed: GnsData,
    pub inner: GnsData,
    pub outer: GnsData,
    pub product: Correspondence,
    pub product_map: TensorMap,
    pub embedding: AdjointableOp,
    /// Largest deviation between the Gram matrices of corresponding
    /// generators `a (cyclic vector) c`.
    pub gram_mismatch: f64,
    pub residual: f64,
    pub isometry_residual: f64,
    pub dim_composed: usize,
    pub dim_product: usize,
}

pub fn compose_embedding(l: &MapKernel, k: &MapKernel, tol: &Tolerance) -> Result<ComposeEmbedding> {
    let lk = schur_compose(l, k, tol)?;
    let composed = gns(&lk, tol)?;
    let inner = gns(k, tol)?;
    let outer = gns(l, tol)?;
    let (product, product_map) = tensor(&inner.corr, &outer.corr, tol)?;
    let targets = inner
        .point_map
        .iter()
        .zip(&outer.point_map)
        .map(|(x, y)| product_map.embed(x, y))
        .collect::<Result<Vec<_>>>()?;
    let image = GnsData::new(product.clone(), targets, false)?;
    let src = composed.cyclic_generators()?;
    let dst = image.cyclic_generators()?;
    let mut blocks = Vec::with_capacity(src.len());
    let (mut gram_mismatch, mut residual) = (0.0f64, 0.0f64);
    for (s, d) in src.iter().zip(&dst) {
        gram_mismatch = gram_mismatch.max(max_abs(&(s.adjoint() * s - d.adjoint() * d)));
        let (x, res) = solve_on_generators(s, d, tol)?;
        residual = residual.max(res);
        blocks.push(x);
    }
    let embedding = AdjointableOp::new(composed.corr.module().clone(), product.module().clone(), blocks)?;
    let isometry_residual = embedding.isometry_residual();
    Ok(ComposeEmbedding {
        dim_composed: composed.corr.module().dim(),
        dim_product: product.module().dim(),
        composed,
        inner,
        outer,
        product,
        product_map,
        embedding,
        gram_mismatch,
        residual,
        isometry_residual,
    })
}

/// Stinespring/KSGNS dilation `H = GNS(K) ⊙ F`, `ρ(a) = a ⊙ id`,
/// `V_σ = L_{i(σ)}`.
#[derive(Debug, Clone)]
pub struct Stinespring {
    pub gns: GnsData,
    pub space: Correspondence,
    pub map: TensorMap,
    pub v: Vec<AdjointableOp>,
}

impl Stinespring {
    /// Matrices of `ρ(a)`, one per right block of `F`.
    pub fn rho(&self, a: &AlgElement) -> Result<Vec<CMatrix>> {
        self.space.act(a)
    }

    /// Largest deviation of `V_σ* ρ(a) V_σ'` from `ρ_F(K^{σ,σ'}(a))` over
    /// matrix units.
    pub fn identity_residual(&self, k: &MapKernel, f: &Correspondence) -> Result<f64> {
        let a = k.from_shape();
        let mut worst = 0.0f64;
        for u in 0..a.dim() {
            let rho = self.space.left_op(&AlgElement::matrix_unit(a, u))?;
            for (s, vs) in self.v.iter().enumerate() {
                let left = vs.adjoint().compose(&rho)?;
                for (t, vt) in self.v.iter().enumerate() {
                    let got = left.compose(vt)?;
                    let expect = f.left_op(&k.entry(s, t).apply_unit(u))?;
                    worst = worst.max(got.max_diff(&expect)?);
                }
            }
        }
        Ok(worst)
    }

    /// `(multiplicativity, *-preservation)` residuals of `ρ` on matrix units.
    pub fn rho_residual(&self) -> (f64, f64) {
        let mut mult = 0.0f64;
        let mut star = 0.0f64;
        for rep in self.space.reps() {
            let a = rep.algebra();
            for (u, (j, i, l)) in a.units().enumerate() {
                let adj = a.unit_index(j, l, i);
                star = star.max(max_abs(&(rep.units()[u].adjoint() - &rep.units()[adj])));
                for (v, (j2, i2, l2)) in a.units().enumerate() {
                    let prod = &rep.units()[u] * &rep.units()[v];
                    let dev = if j == j2 && l == i2 {
                        max_abs(&(prod - &rep.units()[a.unit_index(j, i, l2)]))
                    } else {
                        max_abs(&prod)
                    };
                    mult = mult.max(dev);
                }
            }
        }
        (mult, star)
    }
}

pub fn stinespring(k: &MapKernel, f: &Correspondence, tol: &Tolerance) -> Result<Stinespring> {
    let data = gns(k, tol)?;
    let (space, map) = tensor(&data.corr, f, tol)?;
    let v = data
        .point_map
        .iter()
        .map(|x| map.left_op(x))
        .collect::<Result<Vec<_>>>()?;
    Ok(Stinespring {
        gns: data,
        space,
        map,
        v,
    })
}

/// The default `F`: `B` acting on `⊕_k ℂ^{n_k}`.
pub fn default_target(shape: &AlgebraShape) -> Correspondence {
    Correspondence::identity_rep(shape)
}

/// The same GNS data transported by block unitaries `u_l` on the right
/// blocks: `ρ ↦ u ρ u*`, `i(σ) ↦ u i(σ)`.
pub fn rotate_gns(data: &GnsData, us: &[CMatrix], tol: &Tolerance) -> Result<GnsData> {
    let module = data.corr.module();
    if us.len() != module.ambient().len() || us.iter().zip(module.ambient()).any(|(u, &d)| u.shape() != (d, d)) {
        return Err(Error::ShapeMismatch("one unitary per right block".into()));
    }
    let reps = data
        .corr
        .reps()
        .iter()
        .zip(us)
        .map(|(r, u)| {
            let units = r.units().iter().map(|x| u * x * u.adjoint()).collect();
            Representation::new(r.algebra().clone(), r.dim(), units, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    let corr = Correspondence::new(module.clone(), data.corr.left().clone(), reps)?;
    let point_map = data
        .point_map
        .iter()
        .map(|x| ModVector::new(module.clone(), x.blocks().iter().zip(us).map(|(b, u)| u * b).collect()))
        .collect::<Result<Vec<_>>>()?;
    GnsData::new(corr, point_map, data.minimal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpd::maps::{identity_kernel, LinMap};
    use crate::kernels::default_labels;
    use crate::numerics::{identity, re};
    use crate::random::{random_cmatrix, random_unitary, seeded, Prng};

    fn shape(b: &[usize]) -> AlgebraShape {
        AlgebraShape::new(b.to_vec()).unwrap()
    }

    fn random_cpd(rng: &mut Prng, a: &AlgebraShape, b: &AlgebraShape, n: usize, mults: &[Vec<usize>]) -> MapKernel {
        let reps: Vec<Representation> = mults
            .iter()
            .map(|m| {
                let std = Representation::standard(a, m).unwrap();
                let u = random_unitary(rng, std.dim());
                let units = std.units().iter().map(|x| &u * x * u.adjoint()).collect();
                Representation::new(a.clone(), std.dim(), units, &Tolerance::default()).unwrap()
            })
            .collect();
        let module = HilbertModule::new(b.clone(), reps.iter().map(|r| r.dim()).collect()).unwrap();
        let corr = Correspondence::new(module.clone(), a.clone(), reps).unwrap();
        let xs: Vec<ModVector> = (0..n)
            .map(|_| {
                let blocks = module
                    .ambient()
                    .iter()
                    .zip(b.blocks())
                    .map(|(&d, &nk)| random_cmatrix(rng, d, nk))
                    .collect();
                ModVector::new(module.clone(), blocks).unwrap()
            })
            .collect();
        MapKernel::from_correspondence(default_labels(n), &corr, &xs, &Tolerance::default()).unwrap()
    }

    #[test]
    fn identity_map_gns() {
        let tol = Tolerance::default();
        let s = shape(&[3]);
        let k = MapKernel::one_point(LinMap::identity(&s), &tol).unwrap();
        let g = gns(&k, &tol).unwrap();
        assert_eq!(g.corr.module().ambient(), &[3]);
        assert!(g.reconstruction_error(&k).unwrap() < 1e-12);
        // i(ω) is a unitary, so ⟨i, a i⟩ = a forces the identity bimodule
        let x = g.point_map[0].block(0);
        assert!(max_abs(&(x.adjoint() * x - identity(3))) < 1e-12);
    }

    #[test]
    fn conjugation_gns_has_dimension_two() {
        let mut rng = seeded(71);
        let tol = Tolerance::default();
        let s = shape(&[2]);
        let v = random_cmatrix(&mut rng, 2, 2);
        let t = LinMap::conjugation(&s, &s, &[vec![v.clone()]]).unwrap();
        let k = MapKernel::one_point(t, &tol).unwrap();
        let g = gns(&k, &tol).unwrap();
        assert_eq!(g.corr.module().ambient(), &[2]);
        assert!(g.reconstruction_error(&k).unwrap() < 1e-12);
        // the cyclic vector equals v up to a unitary on the left
        let x = g.point_map[0].block(0);
        assert!(max_abs(&(x.adjoint() * x - v.adjoint() * &v)) < 1e-12);
    }

    #[test]
    fn trace_state_gns() {
        let tol = Tolerance::default();
        let s = shape(&[2]);
        let c = AlgebraShape::scalars();
        let tau = LinMap::from_fn(&s, &c, |a| {
            AlgElement::new(c.clone(), vec![CMatrix::from_element(1, 1, a.block(0).trace() * re(0.5))]).unwrap()
        })
        .unwrap();
        let k = MapKernel::one_point(tau, &tol).unwrap();
        let g = gns(&k, &tol).unwrap();
        assert_eq!(g.corr.module().ambient(), &[4]);
        assert!(g.reconstruction_error(&k).unwrap() < 1e-12);
    }

    #[test]
    fn not_cpd_rejected() {
        let tol = Tolerance::default();
        let k = MapKernel::one_point(LinMap::transpose(&shape(&[2])), &tol).unwrap();
        assert!(matches!(gns(&k, &tol), Err(Error::NotCpd { .. })));
    }

    #[test]
    fn random_gns_reconstructs() {
        let mut rng = seeded(72);
        let tol = Tolerance::default();
        let (a, b) = (shape(&[2, 1]), shape(&[1, 2]));
        for n in 1..=3 {
            let k = random_cpd(&mut rng, &a, &b, n, &[vec![1, 1], vec![2, 1]]);
            let g = gns(&k, &tol).unwrap();
            assert!(g.reconstruction_error(&k).unwrap() < 1e-10);
            let (h, u) = g.corr.relation_residual();
            assert!(h < 1e-10 && u < 1e-10, "{h} {u}");
        }
    }

    #[test]
    fn composition_embedding() {
        let mut rng = seeded(73);
        let tol = Tolerance::default();
        let (a, b, c) = (shape(&[2]), shape(&[2, 1]), shape(&[2]));
        let k = random_cpd(&mut rng, &a, &b, 2, &[vec![2], vec![1]]);
        let l = random_cpd(&mut rng, &b, &c, 2, &[vec![1, 2]]);
        let e = compose_embedding(&l, &k, &tol).unwrap();
        assert!(e.gram_mismatch < 1e-10, "{}", e.gram_mismatch);
        assert!(e.residual < 1e-10);
        assert!(e.isometry_residual < 1e-10);
        assert!(e.dim_composed <= e.dim_product);
        // bimodule property on generators
        let x = AlgElement::new(a.clone(), vec![random_cmatrix(&mut rng, 2, 2)]).unwrap();
        let lhs = e.embedding.compose(&e.composed.corr.left_op(&x).unwrap()).unwrap();
        let rhs = e.product.left_op(&x).unwrap().compose(&e.embedding).unwrap();
        assert!(lhs.max_diff(&rhs).unwrap() < 1e-9);
    }

    #[test]
    fn composition_with_identity_is_unitary() {
        let mut rng = seeded(74);
        let tol = Tolerance::default();
        let (a, b) = (shape(&[2]), shape(&[2]));
        let k = random_cpd(&mut rng, &a, &b, 2, &[vec![2]]);
        let id = identity_kernel(default_labels(2), &b, &tol).unwrap();
        let e = compose_embedding(&id, &k, &tol).unwrap();
        assert_eq!(e.dim_composed, e.dim_product);
        assert!(e.embedding.coisometry_residual() < 1e-9);
    }

    #[test]
    fn one_point_composition_sends_cyclic_to_product() {
        let mut rng = seeded(75);
        let tol = Tolerance::default();
        let s = shape(&[2]);
        let beta = random_cmatrix(&mut rng, 2, 2);
        let gamma = random_cmatrix(&mut rng, 2, 2);
        let k = MapKernel::one_point(LinMap::conjugation(&s, &s, &[vec![beta]]).unwrap(), &tol).unwrap();
        let l = MapKernel::one_point(LinMap::conjugation(&s, &s, &[vec![gamma]]).unwrap(), &tol).unwrap();
        let e = compose_embedding(&l, &k, &tol).unwrap();
        let image = e.embedding.apply(&e.composed.point_map[0]).unwrap();
        let expect = e.product_map.embed(&e.inner.point_map[0], &e.outer.point_map[0]).unwrap();
        assert!(image.max_diff(&expect).unwrap() < 1e-10);
        assert_eq!(e.dim_composed, 4);
    }

    #[test]
    fn stinespring_identity() {
        let mut rng = seeded(76);
        let tol = Tolerance::default();
        let (a, b) = (shape(&[2]), shape(&[2]));
        let k = random_cpd(&mut rng, &a, &b, 2, &[vec![3]]);
        let f = default_target(&b);
        let st = stinespring(&k, &f, &tol).unwrap();
        assert!(st.identity_residual(&k, &f).unwrap() < 1e-10);
        let (m, s) = st.rho_residual();
        assert!(m < 1e-10 && s < 1e-10);
        // KSGNS: F = Hom(ℂ², ℂ³) over M₂ with the standard action of B
        let c = shape(&[2]);
        let rep = Representation::standard(&b, &[1]).unwrap();
        let fmod = HilbertModule::new(c.clone(), vec![2]).unwrap();
        let ks = Correspondence::new(fmod, b.clone(), vec![rep]).unwrap();
        let st = stinespring(&k, &ks, &tol).unwrap();
        assert!(st.identity_residual(&k, &ks).unwrap() < 1e-10);
    }

    #[test]
    fn stinespring_of_identity_map() {
        let tol = Tolerance::default();
        let s = shape(&[3]);
        let k = MapKernel::one_point(LinMap::identity(&s), &tol).unwrap();
        let st = stinespring(&k, &default_target(&s), &tol).unwrap();
        assert_eq!(st.space.module().ambient(), &[3]);
        let v = &st.v[0].blocks()[0];
        assert!(max_abs(&(v.adjoint() * v - identity(3))) < 1e-12);
    }
}
