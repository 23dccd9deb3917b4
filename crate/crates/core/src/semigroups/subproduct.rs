use crate::algebra::{AlgElement, AlgebraShape};
use crate::cpd::{compose_embedding, gns, GnsData, LinMap, MapKernel};
use crate::error::{Error, Result};
use crate::kernels::Witness;
use crate::modcorr::{tensor, Correspondence, ModVector, TensorMap};
use crate::numerics::{Tolerance, C64};
use crate::random::{random_vector, Prng};

/// Generator `L` of a semigroup `T_t = exp(t L)` of maps `B → B`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemigroupGenerator {
    map: LinMap,
}

impl SemigroupGenerator {
    pub fn new(map: LinMap) -> Result<Self> {
        if map.from_shape() != map.to_shape() {
            return Err(Error::ShapeMismatch("generator must map B to B".into()));
        }
        Ok(Self { map })
    }

    /// `L(a) = Σ l* a l - {Σ l* l, a}/2 + i[h, a]`.
    pub fn lindblad(shape: &AlgebraShape, jumps: &[AlgElement], h: &AlgElement) -> Result<Self> {
        let mut beta = h.scale(C64::new(0.0, -1.0));
        for l in jumps {
            beta = beta.sub(&l.adjoint().mul(l)?.scale(C64::new(0.5, 0.0)))?;
        }
        let map = LinMap::from_fn(shape, shape, |a| {
            let mut out = a.mul(&beta).and_then(|x| x.add(&beta.adjoint().mul(a)?)).expect("same shape");
            for l in jumps {
                out = out.add(&l.adjoint().mul(a).and_then(|x| x.mul(l)).expect("same shape")).expect("same shape");
            }
            out
        })?;
        Self::new(map)
    }

    /// `L(a) = i[h, a]`, generating `a ↦ e^{ith} a e^{-ith}`.
    pub fn automorphism(shape: &AlgebraShape, h: &AlgElement) -> Result<Self> {
        Self::lindblad(shape, &[], h)
    }

    pub fn map(&self) -> &LinMap {
        &self.map
    }

    pub fn shape(&self) -> &AlgebraShape {
        self.map.from_shape()
    }

    /// `T_t = exp(t L)`.
    pub fn at(&self, t: f64) -> LinMap {
        exp_map(&self.map, t)
    }

    pub fn cp_on_grid(&self, times: &[f64], tol: &Tolerance) -> Result<Vec<(f64, Witness)>> {
        times.iter().map(|&t| Ok((t, self.at(t).is_cp(tol)?))).collect()
    }
}

fn exp_map(map: &LinMap, t: f64) -> LinMap {
    let action = (map.action() * C64::new(t, 0.0)).exp();
    LinMap::new(map.from_shape().clone(), map.to_shape().clone(), action).expect("shape preserved")
}

/// `exp(t 𝔏^{σ,σ'})` entrywise.
pub fn exp_kernel(gen: &MapKernel, t: f64, tol: &Tolerance) -> Result<MapKernel> {
    gen.map_entries(|m| exp_map(m, t), tol)
}

/// `𝔏^{σ,σ'}(b) = Σ_r l_{rσ}* b l_{rσ'} + b β_σ' + β_σ* b`.
pub fn cpd_generator(
    points: Vec<String>,
    shape: &AlgebraShape,
    l: &[Vec<AlgElement>],
    beta: &[AlgElement],
    tol: &Tolerance,
) -> Result<MapKernel> {
    let n = points.len();
    if beta.len() != n || l.iter().any(|row| row.len() != n) {
        return Err(Error::ShapeMismatch("one coefficient per point".into()));
    }
    let mut entries = Vec::with_capacity(n * n);
    for s in 0..n {
        for u in 0..n {
            let map = LinMap::from_fn(shape, shape, |b| {
                let mut out = b
                    .mul(&beta[u])
                    .and_then(|x| x.add(&beta[s].adjoint().mul(b)?))
                    .expect("same shape");
                for row in l {
                    let term = row[s].adjoint().mul(b).and_then(|x| x.mul(&row[u])).expect("same shape");
                    out = out.add(&term).expect("same shape");
                }
                out
            })?;
            entries.push(map);
        }
    }
    MapKernel::new(points, entries, tol)
}

fn gns_at(kernel: &MapKernel, time: f64, tol: &Tolerance) -> Result<GnsData> {
    gns(kernel, tol).map_err(|e| match e {
        Error::NotCpd { .. } if kernel.len() == 1 => Error::NotCpAtTime { time },
        Error::NotCpd { .. } => Error::NotCpdAtTime { time },
        other => other,
    })
}

/// Largest deviation of `⟨ξ_σ, a ξ_σ'⟩` from `target^{σ,σ'}(a)`.
fn unit_residual(corr: &Correspondence, xs: Vec<ModVector>, target: &MapKernel) -> Result<f64> {
    GnsData::new(corr.clone(), xs, false)?.reconstruction_error(target)
}

/// Validation data for `𝔈_{s+t} ⊂ 𝔈_s ⊙ 𝔈_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproductReport {
    pub s: f64,
    pub t: f64,
    pub dim_s: usize,
    pub dim_t: usize,
    pub dim_sum: usize,
    pub dim_product: usize,
    /// Deviation of `⟨ξ_s⊙ξ_t, a ξ_s⊙ξ_t⟩` from `T_{s+t}(a)`.
    pub unit_residual: f64,
    pub gram_mismatch: f64,
    pub residual: f64,
    pub isometry_residual: f64,
    pub coisometry_residual: f64,
    /// Triple products over times `(s, t, s+t)` in both bracketings.
    pub assoc_dims_equal: bool,
    pub assoc_gram_mismatch: f64,
    pub assoc_unit_residual: f64,
}

impl SubproductReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.unit_residual,
            self.gram_mismatch,
            self.residual,
            self.isometry_residual,
            self.assoc_gram_mismatch,
            self.assoc_unit_residual,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// The embedding is onto.
    pub fn is_unitary(&self, limit: f64) -> bool {
        self.dim_sum == self.dim_product && self.coisometry_residual <= limit
    }
}

/// Checks the product system structure of the GNS correspondences of the CP
/// semigroup `exp(t L)` at times `s, t`, with `probes` random vectors for the
/// associativity comparison.
pub fn subproduct_check(
    gen: &SemigroupGenerator,
    s: f64,
    t: f64,
    rng: &mut Prng,
    probes: usize,
    tol: &Tolerance,
) -> Result<SubproductReport> {
    let ks = MapKernel::one_point(gen.at(s), tol)?;
    let kt = MapKernel::one_point(gen.at(t), tol)?;
    let ku = MapKernel::one_point(gen.at(s + t), tol)?;
    let es = gns_at(&ks, s, tol)?;
    let et = gns_at(&kt, t, tol)?;
    let eu = gns_at(&ku, s + t, tol)?;
    let emb = compose_embedding(&kt, &ks, tol)?;
    let unit = emb.product_map.embed(&es.point_map[0], &et.point_map[0])?;
    let unit_dev = unit_residual(&emb.product, vec![unit], &ku)?;

    // (𝔈_s ⊙ 𝔈_t) ⊙ 𝔈_{s+t} against 𝔈_s ⊙ (𝔈_t ⊙ 𝔈_{s+t}); only the middle
    // factor needs a left action
    let st_map = TensorMap::new(es.corr.module(), &et.corr, tol)?;
    let left_map = TensorMap::new(st_map.module(), &eu.corr, tol)?;
    let (tu, tu_map) = tensor(&et.corr, &eu.corr, tol)?;
    let right_map = TensorMap::new(es.corr.module(), &tu, tol)?;
    let triple = |x: &ModVector, y: &ModVector, z: &ModVector| -> Result<(ModVector, ModVector)> {
        Ok((
            left_map.embed(&st_map.embed(x, y)?, z)?,
            right_map.embed(x, &tu_map.embed(y, z)?)?,
        ))
    };
    let k2 = MapKernel::one_point(gen.at(2.0 * (s + t)), tol)?;
    let (xs, xt, xu) = (&es.point_map[0], &et.point_map[0], &eu.point_map[0]);
    let (lu, ru) = triple(xs, xt, xu)?;
    // a acts on the first factor of either bracketing
    let a = es.corr.left();
    let mut assoc_unit_residual = 0.0f64;
    for u in 0..a.dim() {
        let moved = es.corr.apply(&AlgElement::matrix_unit(a, u), xs)?;
        let (lm, rm) = triple(&moved, xt, xu)?;
        let expect = k2.entry(0, 0).apply_unit(u);
        assoc_unit_residual = assoc_unit_residual
            .max(lu.inner(&lm)?.max_diff(&expect)?)
            .max(ru.inner(&rm)?.max_diff(&expect)?);
    }
    let mut lhs = Vec::with_capacity(probes);
    let mut rhs = Vec::with_capacity(probes);
    for _ in 0..probes {
        let x = random_vector(rng, es.corr.module());
        let y = random_vector(rng, et.corr.module());
        let z = random_vector(rng, eu.corr.module());
        let (l, r) = triple(&x, &y, &z)?;
        lhs.push(l);
        rhs.push(r);
    }
    let mut assoc_gram_mismatch = 0.0f64;
    for i in 0..probes {
        for j in 0..probes {
            let a = lhs[i].inner(&lhs[j])?;
            let b = rhs[i].inner(&rhs[j])?;
            assoc_gram_mismatch = assoc_gram_mismatch.max(a.max_diff(&b)?);
        }
    }
    Ok(SubproductReport {
        s,
        t,
        dim_s: es.corr.module().dim(),
        dim_t: et.corr.module().dim(),
        dim_sum: emb.dim_composed,
        dim_product: emb.dim_product,
        unit_residual: unit_dev,
        gram_mismatch: emb.gram_mismatch,
        residual: emb.residual,
        isometry_residual: emb.isometry_residual,
        coisometry_residual: emb.embedding.coisometry_residual(),
        assoc_dims_equal: left_map.module().dim() == right_map.module().dim(),
        assoc_gram_mismatch,
        assoc_unit_residual,
    })
}

/// Validation data for the CPD semigroup `𝔗_t = exp(t 𝔏)` at times `s, t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CpdSemigroupReport {
    pub s: f64,
    pub t: f64,
    pub dim_sum: usize,
    pub dim_product: usize,
    /// Deviation of `⟨ξ^σ_s⊙ξ^σ_t, a ξ^σ'_s⊙ξ^σ'_t⟩` from `𝔗^{σ,σ'}_{s+t}(a)`.
    pub unit_residual: f64,
    pub gram_mismatch: f64,
    pub residual: f64,
    pub isometry_residual: f64,
}

impl CpdSemigroupReport {
    pub fn max_residual(&self) -> f64 {
        [self.unit_residual, self.gram_mismatch, self.residual, self.isometry_residual]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// `is_cpd` of `exp(t 𝔏)` at each time.
pub fn cpd_on_grid(gen: &MapKernel, times: &[f64], tol: &Tolerance) -> Result<Vec<(f64, Witness)>> {
    times
        .iter()
        .map(|&t| Ok((t, exp_kernel(gen, t, tol)?.is_cpd(tol)?)))
        .collect()
}

pub fn cpd_semigroup_check(gen: &MapKernel, s: f64, t: f64, tol: &Tolerance) -> Result<CpdSemigroupReport> {
    if gen.from_shape() != gen.to_shape() {
        return Err(Error::ShapeMismatch("generator must map B to B".into()));
    }
    let ks = exp_kernel(gen, s, tol)?;
    let kt = exp_kernel(gen, t, tol)?;
    let ku = exp_kernel(gen, s + t, tol)?;
    for (k, time) in [(&ks, s), (&kt, t), (&ku, s + t)] {
        let w = k.is_cpd(tol)?;
        if !w.holds {
            return Err(Error::NotCpdAtTime { time });
        }
    }
    let emb = compose_embedding(&kt, &ks, tol)?;
    let units = emb
        .inner
        .point_map
        .iter()
        .zip(&emb.outer.point_map)
        .map(|(x, y)| emb.product_map.embed(x, y))
        .collect::<Result<Vec<_>>>()?;
    let unit_dev = unit_residual(&emb.product, units, &ku)?;
    Ok(CpdSemigroupReport {
        s,
        t,
        dim_sum: emb.dim_composed,
        dim_product: emb.dim_product,
        unit_residual: unit_dev,
        gram_mismatch: emb.gram_mismatch,
        residual: emb.residual,
        isometry_residual: emb.isometry_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::default_labels;
    use crate::numerics::{max_abs, CMatrix};
    use crate::random::{random_cmatrix, random_hermitian, seeded};

    fn element(shape: &AlgebraShape, m: CMatrix) -> AlgElement {
        AlgElement::new(shape.clone(), vec![m]).unwrap()
    }

    #[test]
    fn zero_generator_is_identity() {
        let shape = AlgebraShape::full(2).unwrap();
        let g = SemigroupGenerator::lindblad(&shape, &[], &AlgElement::zero(&shape)).unwrap();
        assert!(max_abs(g.map().action()) == 0.0);
        assert!(g.at(3.0).max_diff(&LinMap::identity(&shape)).unwrap() < 1e-15);
    }

    #[test]
    fn lindblad_is_unital_and_cp() {
        let mut rng = seeded(111);
        let tol = Tolerance::default();
        let shape = AlgebraShape::full(3).unwrap();
        let jumps = vec![element(&shape, random_cmatrix(&mut rng, 3, 3)), element(&shape, random_cmatrix(&mut rng, 3, 3))];
        let h = element(&shape, random_hermitian(&mut rng, 3));
        let g = SemigroupGenerator::lindblad(&shape, &jumps, &h).unwrap();
        let one = AlgElement::unit(&shape);
        assert!(g.map().apply(&one).unwrap().max_abs() < 1e-13);
        for (t, w) in g.cp_on_grid(&crate::semigroups::default_time_grid(), &tol).unwrap() {
            assert!(w.holds, "t={t}");
        }
    }

    #[test]
    fn automorphism_semigroup_is_unitary() {
        let mut rng = seeded(112);
        let tol = Tolerance::default();
        let shape = AlgebraShape::full(2).unwrap();
        let h = element(&shape, random_hermitian(&mut rng, 2));
        let g = SemigroupGenerator::automorphism(&shape, &h).unwrap();
        let r = subproduct_check(&g, 0.4, 0.9, &mut rng, 3, &tol).unwrap();
        assert!(r.max_residual() < 1e-9, "{r:?}");
        assert!(r.is_unitary(1e-9));
        assert_eq!(r.dim_s, 4);
        assert!(r.assoc_dims_equal);
    }

    #[test]
    fn dissipative_semigroup_is_subproduct() {
        let mut rng = seeded(113);
        let tol = Tolerance::default();
        let shape = AlgebraShape::full(2).unwrap();
        let jumps = vec![element(&shape, random_cmatrix(&mut rng, 2, 2))];
        let h = element(&shape, random_hermitian(&mut rng, 2));
        let g = SemigroupGenerator::lindblad(&shape, &jumps, &h).unwrap();
        let r = subproduct_check(&g, 0.3, 0.5, &mut rng, 3, &tol).unwrap();
        assert!(r.max_residual() < 1e-9, "{r:?}");
        assert!(r.dim_sum <= r.dim_product);
        assert!(r.assoc_dims_equal);
    }

    #[test]
    fn non_cp_generator_rejected() {
        let tol = Tolerance::default();
        let shape = AlgebraShape::full(2).unwrap();
        let g = SemigroupGenerator::new(LinMap::transpose(&shape)).unwrap();
        let mut rng = seeded(114);
        assert!(matches!(
            subproduct_check(&g, 0.5, 0.5, &mut rng, 2, &tol),
            Err(Error::NotCpAtTime { .. })
        ));
    }

    #[test]
    fn cpd_semigroup() {
        let mut rng = seeded(115);
        let tol = Tolerance::default();
        let shape = AlgebraShape::full(2).unwrap();
        let l: Vec<Vec<AlgElement>> = (0..2)
            .map(|_| (0..2).map(|_| element(&shape, random_cmatrix(&mut rng, 2, 2))).collect())
            .collect();
        let beta: Vec<AlgElement> = (0..2).map(|_| element(&shape, random_cmatrix(&mut rng, 2, 2))).collect();
        let gen = cpd_generator(default_labels(2), &shape, &l, &beta, &tol).unwrap();
        for (t, w) in cpd_on_grid(&gen, &[0.1, 1.0, 4.0], &tol).unwrap() {
            assert!(w.holds, "t={t}");
        }
        let r = cpd_semigroup_check(&gen, 0.2, 0.7, &tol).unwrap();
        assert!(r.max_residual() < 1e-9, "{r:?}");
        assert!(r.dim_sum <= r.dim_product);
    }
}
