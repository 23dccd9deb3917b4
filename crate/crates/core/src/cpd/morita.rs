use crate::algebra::AlgElement;
use crate::error::{Error, Result};
use crate::modcorr::{tensor, Correspondence, Dual, HilbertModule, ModVector, Representation, TensorMap};
use crate::numerics::{CMatrix, Tolerance};
use crate::random::{random_vector, Prng};

/// `E* ⊙ 𝔈 ⊙ E` for a correspondence `𝔈` over `K(E)`.
#[derive(Debug, Clone)]
pub struct Sandwich {
    pub dual: Dual,
    pub inner: Correspondence,
    /// `E* ⊙ 𝔈` and its tensor map.
    pub left: Correspondence,
    pub left_map: TensorMap,
    pub result: Correspondence,
    pub right_map: TensorMap,
}

impl Sandwich {
    /// `x* ⊙ y ⊙ z`.
    pub fn embed(&self, x: &ModVector, y: &ModVector, z: &ModVector) -> Result<ModVector> {
        let xy = self.left_map.embed(&self.dual.dual_vector(x)?, y)?;
        self.right_map.embed(&xy, z)
    }
}

pub fn morita_sandwich(module: &HilbertModule, inner: &Correspondence, tol: &Tolerance) -> Result<Sandwich> {
    let dual = Dual::new(module)?;
    if inner.left() != dual.compacts() || inner.right() != dual.compacts() {
        return Err(Error::MiddleAlgebraMismatch);
    }
    let e = dual.module_over_compacts()?;
    let (left, left_map) = tensor(dual.correspondence(), inner, tol)?;
    let (result, right_map) = tensor(&left, &e, tol)?;
    Ok(Sandwich {
        dual,
        inner: inner.clone(),
        left,
        left_map,
        result,
        right_map,
    })
}

/// Correspondence over `K(E)` induced by the inner automorphism
/// `a ↦ u* a u`.
pub fn inner_automorphism(dual: &Dual, u: &[CMatrix], tol: &Tolerance) -> Result<Correspondence> {
    let k = dual.compacts();
    if u.len() != k.num_blocks() {
        return Err(Error::ShapeMismatch("one unitary per block".into()));
    }
    let module = HilbertModule::trivial(k);
    let reps = (0..k.num_blocks())
        .map(|blk| {
            Representation::from_fn(
                k.clone(),
                k.block(blk),
                |a| u[blk].adjoint() * a.block(blk) * &u[blk],
                tol,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Correspondence::new(module, k.clone(), reps)
}

/// Validation data for `(E*⊙𝔈₁⊙E) ⊙ (E*⊙𝔈₂⊙E) ≅ E*⊙(𝔈₁⊙𝔈₂)⊙E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Compatibility {
    pub dims_equal: bool,
    /// Largest Gram-matrix deviation over the sampled generators.
    pub gram_mismatch: f64,
}

/// Compares inner products of `(x₁*⊙y₁⊙z₁) ⊙ (x₂*⊙y₂⊙z₂)` and
/// `x₁* ⊙ (y₁ ⊙ θ_{z₁,x₂} y₂) ⊙ z₂` over `samples` random generator tuples.
pub fn sandwich_compatibility(
    module: &HilbertModule,
    e1: &Correspondence,
    e2: &Correspondence,
    rng: &mut Prng,
    samples: usize,
    tol: &Tolerance,
) -> Result<Compatibility> {
    let s1 = morita_sandwich(module, e1, tol)?;
    let s2 = morita_sandwich(module, e2, tol)?;
    let (lhs, lhs_map) = tensor(&s1.result, &s2.result, tol)?;
    let (e12, e12_map) = tensor(e1, e2, tol)?;
    let s12 = morita_sandwich(module, &e12, tol)?;
    let dims_equal = lhs.module().ambient() == s12.result.module().ambient();
    let mut left_vecs = Vec::with_capacity(samples);
    let mut right_vecs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let (x1, z1, x2, z2) = (
            random_vector(rng, module),
            random_vector(rng, module),
            random_vector(rng, module),
            random_vector(rng, module),
        );
        let y1 = random_vector(rng, e1.module());
        let y2 = random_vector(rng, e2.module());
        let a = s1.embed(&x1, &y1, &z1)?;
        let b = s2.embed(&x2, &y2, &z2)?;
        left_vecs.push(lhs_map.embed(&a, &b)?);
        let theta = s1.dual.rank_one(&z1, &x2)?;
        let y12 = e12_map.embed(&y1, &e2.apply(&theta, &y2)?)?;
        right_vecs.push(s12.embed(&x1, &y12, &z2)?);
    }
    let mut gram_mismatch = 0.0f64;
    for i in 0..samples {
        for j in 0..samples {
            let l = left_vecs[i].inner(&left_vecs[j])?;
            let r = right_vecs[i].inner(&right_vecs[j])?;
            gram_mismatch = gram_mismatch.max(l.max_diff(&r)?);
        }
    }
    Ok(Compatibility {
        dims_equal,
        gram_mismatch,
    })
}

/// Largest deviation of `⟨x*⊙y, x'*⊙y'⟩` from `⟨⟨x,y⟩, ⟨x',y'⟩⟩_B` for the
/// sandwich of the trivial correspondence, sampled on random vectors.
pub fn trivial_sandwich_mismatch(module: &HilbertModule, rng: &mut Prng, samples: usize, tol: &Tolerance) -> Result<f64> {
    let dual = Dual::new(module)?;
    let trivial = Correspondence::trivial(dual.compacts());
    let s = morita_sandwich(module, &trivial, tol)?;
    let one = ModVector::from_element(&AlgElement::unit(dual.compacts()));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for _ in 0..samples {
        xs.push(random_vector(rng, module));
        ys.push(random_vector(rng, module));
    }
    let embedded = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| s.embed(x, &one, y))
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for i in 0..samples {
        for j in 0..samples {
            let got = embedded[i].inner(&embedded[j])?;
            let expect = xs[i].inner(&ys[i])?.adjoint().mul(&xs[j].inner(&ys[j])?)?;
            worst = worst.max(got.max_diff(&expect)?);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraShape;
    use crate::random::{random_unitary, seeded};

    fn module(blocks: &[usize], ambient: &[usize]) -> HilbertModule {
        HilbertModule::new(AlgebraShape::new(blocks.to_vec()).unwrap(), ambient.to_vec()).unwrap()
    }

    #[test]
    fn trivial_sandwich_is_b() {
        let mut rng = seeded(91);
        let tol = Tolerance::default();
        let e = module(&[2, 1], &[3, 2]);
        let dual = Dual::new(&e).unwrap();
        let s = morita_sandwich(&e, &Correspondence::trivial(dual.compacts()), &tol).unwrap();
        assert_eq!(s.result.module().ambient(), &[2, 1]);
        assert!(trivial_sandwich_mismatch(&e, &mut rng, 6, &tol).unwrap() < 1e-10);
    }

    #[test]
    fn inner_automorphism_sandwich() {
        let mut rng = seeded(92);
        let tol = Tolerance::default();
        let e = module(&[2], &[3]);
        let dual = Dual::new(&e).unwrap();
        let u = vec![random_unitary(&mut rng, 3)];
        let twisted = inner_automorphism(&dual, &u, &tol).unwrap();
        let s = morita_sandwich(&e, &twisted, &tol).unwrap();
        assert_eq!(s.result.module().ambient(), &[2]);
        let (h, n) = s.result.relation_residual();
        assert!(h < 1e-12 && n < 1e-12);
    }

    #[test]
    fn product_compatibility() {
        let mut rng = seeded(93);
        let tol = Tolerance::default();
        let e = module(&[2, 1], &[2, 1]);
        let dual = Dual::new(&e).unwrap();
        let e1 = inner_automorphism(&dual, &[random_unitary(&mut rng, 2), random_unitary(&mut rng, 1)], &tol).unwrap();
        // a non-invertible one: multiplicities (2, 1) in block 0, (0, 1) in block 1
        let k = dual.compacts();
        let reps = [vec![2, 1], vec![0, 1]]
            .iter()
            .map(|m| {
                let std = Representation::standard(k, m).unwrap();
                let w = random_unitary(&mut rng, std.dim());
                let units = std.units().iter().map(|x| &w * x * w.adjoint()).collect();
                Representation::new(k.clone(), std.dim(), units, &tol).unwrap()
            })
            .collect::<Vec<_>>();
        let m2 = HilbertModule::new(k.clone(), reps.iter().map(|r| r.dim()).collect()).unwrap();
        let e2 = Correspondence::new(m2, k.clone(), reps).unwrap();
        let c = sandwich_compatibility(&e, &e1, &e2, &mut rng, 5, &tol).unwrap();
        assert!(c.dims_equal);
        assert!(c.gram_mismatch < 1e-10, "{}", c.gram_mismatch);
    }

    #[test]
    fn mismatched_inner_rejected() {
        let tol = Tolerance::default();
        let e = module(&[2], &[3]);
        let wrong = Correspondence::trivial(&AlgebraShape::full(2).unwrap());
        assert!(matches!(morita_sandwich(&e, &wrong, &tol), Err(Error::MiddleAlgebraMismatch)));
    }
}
