//! Seeded random instances for property checks.

use crate::algebra::{AlgElement, AlgebraShape};
use crate::cpd::{phi_map_matrix, LinMap, MapKernel, PhiMapInput};
use crate::error::Result;
use crate::kernels::{default_labels, OpKernel};
use crate::modcorr::{Correspondence, HilbertModule, ModVector, Representation};
use crate::numerics::{block_diag, identity, kron, CMatrix, Tolerance, C64};
use crate::random::{index, normal_c64, random_cmatrix, random_hermitian, random_unitary, random_vector, uniform, Prng};
use crate::semigroups::{ScalarGenerator, SemigroupGenerator};

/// One or two blocks, the first of size at most `max.0`, the second at most
/// `max.1`.
pub fn shape_up_to(rng: &mut Prng, max: (usize, usize)) -> AlgebraShape {
    let mut blocks = vec![index(rng, 1, max.0)];
    if max.1 > 0 && index(rng, 0, 1) == 1 {
        blocks.push(index(rng, 1, max.1));
    }
    AlgebraShape::new(blocks).expect("positive blocks")
}

/// Random shape with `dim ≤ max_dim` (at least `ℂ`).
pub fn shape_with_dim(rng: &mut Prng, max_dim: usize) -> AlgebraShape {
    loop {
        let nb = index(rng, 1, 3);
        let blocks: Vec<usize> = (0..nb).map(|_| index(rng, 1, 3)).collect();
        if blocks.iter().map(|n| n * n).sum::<usize>() <= max_dim {
            return AlgebraShape::new(blocks).expect("positive blocks");
        }
    }
}

/// Module over `shape` with ambient dimensions in `0..=max_ambient`, not all
/// zero.
pub fn module(rng: &mut Prng, shape: &AlgebraShape, max_ambient: usize) -> HilbertModule {
    loop {
        let ambient: Vec<usize> = (0..shape.num_blocks()).map(|_| index(rng, 0, max_ambient)).collect();
        if ambient.iter().any(|&d| d > 0) {
            return HilbertModule::new(shape.clone(), ambient).expect("matching blocks");
        }
    }
}

pub fn vectors(rng: &mut Prng, module: &HilbertModule, count: usize) -> Vec<ModVector> {
    (0..count).map(|_| random_vector(rng, module)).collect()
}

/// Gram kernel `⟨x_σ, x_σ'⟩` of random vectors, together with the vectors.
pub fn pd_kernel(
    rng: &mut Prng,
    shape: &AlgebraShape,
    points: usize,
    max_ambient: usize,
    tol: &Tolerance,
) -> Result<(OpKernel, Vec<ModVector>)> {
    let m = module(rng, shape, max_ambient);
    let xs = vectors(rng, &m, points);
    Ok((OpKernel::gram(default_labels(points), &xs, tol)?, xs))
}

pub fn element(rng: &mut Prng, shape: &AlgebraShape) -> AlgElement {
    let blocks = shape.blocks().iter().map(|&n| random_cmatrix(rng, n, n)).collect();
    AlgElement::new(shape.clone(), blocks).expect("matching blocks")
}

pub fn hermitian_element(rng: &mut Prng, shape: &AlgebraShape) -> AlgElement {
    let blocks = shape.blocks().iter().map(|&n| random_hermitian(rng, n)).collect();
    AlgElement::new(shape.clone(), blocks).expect("matching blocks")
}

/// Correspondence from `left` to `right` whose block `k` carries `left` with
/// random multiplicities in `0..=max_mult`, conjugated by a random unitary.
pub fn correspondence(
    rng: &mut Prng,
    left: &AlgebraShape,
    right: &AlgebraShape,
    max_mult: usize,
) -> Result<Correspondence> {
    loop {
        let mults: Vec<Vec<usize>> = (0..right.num_blocks())
            .map(|_| (0..left.num_blocks()).map(|_| index(rng, 0, max_mult)).collect())
            .collect();
        if mults.iter().flatten().all(|&m| m == 0) {
            continue;
        }
        let reps = mults
            .iter()
            .map(|m| {
                let std = Representation::standard(left, m)?;
                Ok(std.conjugate(&random_unitary(rng, std.dim())))
            })
            .collect::<Result<Vec<_>>>()?;
        let module = HilbertModule::new(right.clone(), reps.iter().map(|r| r.dim()).collect())?;
        return Correspondence::new(module, left.clone(), reps);
    }
}

/// CPD kernel `⟨x_σ, a x_σ'⟩` from random vectors in a random
/// correspondence.
pub fn cpd_kernel(
    rng: &mut Prng,
    from: &AlgebraShape,
    to: &AlgebraShape,
    points: usize,
    max_mult: usize,
    tol: &Tolerance,
) -> Result<MapKernel> {
    let corr = correspondence(rng, from, to, max_mult)?;
    let xs = vectors(rng, corr.module(), points);
    MapKernel::from_correspondence(default_labels(points), &corr, &xs, tol)
}

/// Sum of `kraus` random conjugation maps.
pub fn cp_map(rng: &mut Prng, from: &AlgebraShape, to: &AlgebraShape, kraus: usize) -> Result<LinMap> {
    let mut out = LinMap::zero(from, to);
    for _ in 0..kraus {
        let v: Vec<Vec<CMatrix>> = from
            .blocks()
            .iter()
            .map(|&nj| to.blocks().iter().map(|&nk| random_cmatrix(rng, nj, nk)).collect())
            .collect();
        out = out.add(&LinMap::conjugation(from, to, &v)?)?;
    }
    Ok(out)
}

/// `φ(b) = V* ρ₀(b) V` and `T(x) = U Ψ₀(x) V` for the standard
/// representations of multiplicity `m` and a random isometry `U` with
/// `extra` spare dimensions.
pub fn phi_map_dilation(
    rng: &mut Prng,
    blocks: &[usize],
    ambient: &[usize],
    h1: usize,
    m: usize,
    extra: usize,
) -> Result<PhiMapInput> {
    let b = AlgebraShape::new(blocks.to_vec())?;
    let module = HilbertModule::new(b.clone(), ambient.to_vec())?;
    let n_total: usize = blocks.iter().sum::<usize>() * m;
    let d_total: usize = ambient.iter().sum::<usize>() * m;
    let v = random_cmatrix(rng, n_total, h1);
    let u = random_unitary(rng, d_total + extra).columns(0, d_total).into_owned();
    let target = AlgebraShape::full(h1)?;
    let phi = LinMap::from_fn(&b, &target, |a| {
        let rho: Vec<CMatrix> = a.blocks().iter().map(|x| kron(x, &identity(m))).collect();
        AlgElement::new(target.clone(), vec![v.adjoint() * block_diag(&rho) * &v]).expect("h1 x h1")
    })?;
    let t = phi_map_matrix(&module, h1, d_total + extra, |x| {
        let psi: Vec<CMatrix> = x.blocks().iter().map(|xk| kron(xk, &identity(m))).collect();
        &u * block_diag(&psi) * &v
    })?;
    PhiMapInput::new(module, h1, d_total + extra, t, phi)
}

/// Conditionally positive definite `ℓ = P + c 1* + 1 c*` with `P` PSD and
/// `Re c` chosen so that the diagonal is nonpositive.
pub fn cond_pd_generator(rng: &mut Prng, points: usize, tol: &Tolerance) -> Result<ScalarGenerator> {
    let rank = index(rng, 1, points);
    let g = random_cmatrix(rng, points, rank);
    let p = &g * g.adjoint();
    let c: Vec<C64> = (0..points)
        .map(|s| C64::new(-p[(s, s)].re / 2.0 - uniform(rng, 0.0, 1.0), normal_c64(rng).im))
        .collect();
    let l = CMatrix::from_fn(points, points, |s, u| p[(s, u)] + c[u] + c[s].conj());
    ScalarGenerator::from_matrix(l, tol)
}

/// Lindblad generator on `M_n` with `jumps` random jump operators and a
/// random Hamiltonian; `jumps = 0` gives an automorphism group.
pub fn lindblad(rng: &mut Prng, n: usize, jumps: usize) -> Result<SemigroupGenerator> {
    let shape = AlgebraShape::full(n)?;
    let ls: Vec<AlgElement> = (0..jumps)
        .map(|_| AlgElement::new(shape.clone(), vec![random_cmatrix(rng, n, n) * C64::new(0.5, 0.0)]))
        .collect::<Result<Vec<_>>>()?;
    let h = AlgElement::new(shape.clone(), vec![random_hermitian(rng, n)])?;
    SemigroupGenerator::lindblad(&shape, &ls, &h)
}

/// Density matrix with full rank on `M_n`.
pub fn faithful_density(rng: &mut Prng, n: usize) -> CMatrix {
    let g = random_cmatrix(rng, n, n);
    let rho = &g * g.adjoint() + identity(n) * C64::new(0.1, 0.0);
    let tr: C64 = rho.trace();
    rho / tr
}

/// Hermitian element of `M_n` drawn from a mix of squares, negated squares,
/// generic elements and elements shifted to within `gap` of the boundary of
/// the positive cone (on either side).
pub fn hermitian_mix(rng: &mut Prng, n: usize, gap: f64) -> CMatrix {
    let h = random_hermitian(rng, n);
    match index(rng, 0, 3) {
        0 => {
            let g = random_cmatrix(rng, n, n);
            &g * g.adjoint()
        }
        1 => {
            let g = random_cmatrix(rng, n, n);
            -(&g * g.adjoint())
        }
        2 => h,
        _ => {
            let lo = h.clone().symmetric_eigenvalues().min();
            let side = if index(rng, 0, 1) == 0 { gap } else { -gap };
            h - identity(n) * C64::new(lo - side, 0.0)
        }
    }
}
