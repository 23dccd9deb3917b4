//! The built-in acceptance suite: numbered criteria over seeded random
//! instances plus golden fixtures. Failures are report entries, never
//! errors.

use std::path::Path;
use std::time::Instant;

use opkernel_core::cpd::{
    compose_embedding, default_target, gns, phi_map_sextuple, phi_map_sextuple_with, rotate_gns, schur_compose,
    sextuple_intertwiner, stinespring, LinMap,
};
use opkernel_core::json::{KernelJson, MapKernelJson, StarProblemJson};
use opkernel_core::kernels::{universal_isometry, Decomposition};
use opkernel_core::modcorr::{gram_element, submodule_from_generators, tensor, AdjointableOp};
use opkernel_core::numerics::{eig_hermitian, CMatrix};
use opkernel_core::random::{index, random_cmatrix, random_unitary, seeded, Prng};
use opkernel_core::samples::{
    correspondence, cpd_kernel, cond_pd_generator, element, faithful_density, hermitian_mix, lindblad, module,
    pd_kernel, phi_map_dilation, shape_up_to, shape_with_dim, vectors,
};
use opkernel_core::semigroups::{fock_exponential_report, subproduct_check};
use opkernel_core::starpos::{
    is_s_positive, kolmogorov_star, s_square_root, FunctionalSet, StarAlgebra, StarKernel,
};
use opkernel_core::{AlgElement, AlgebraShape, Functional, Result, Tolerance, C64};

use crate::commands::{parse_json, FOCK_SLACK, PROBES, RECONSTRUCTION_TOL};
use crate::config::Config;
use crate::report::{Check, Report};

/// Golden inputs shipped with the repository.
pub const FIXTURES: [(&str, &str); 5] = [
    ("pd_ok", include_str!("../../../fixtures/pd_ok.json")),
    ("pd_bad", include_str!("../../../fixtures/pd_bad.json")),
    ("cpd_identity", include_str!("../../../fixtures/cpd_identity.json")),
    ("cpd_transpose", include_str!("../../../fixtures/cpd_transpose.json")),
    ("spositive", include_str!("../../../fixtures/spositive.json")),
];

type CriterionFn = fn(&mut Prng, &Tolerance, &Config) -> Result<Vec<Check>>;

pub const CRITERIA: [(u64, CriterionFn); 11] = [
    (1, kolmogorov_roundtrip),
    (2, universal_property),
    (3, cpd_kolmogorov),
    (4, composition_closure),
    (5, tensor_identity),
    (6, gram_positivity),
    (7, stinespring_identity),
    (8, phi_map_uniqueness),
    (9, schoenberg_correspondence),
    (10, subproduct_units),
    (11, s_positivity),
];

/// Fixture texts, from `dir` when given, otherwise the built-in copies.
pub fn load_fixtures(dir: Option<&Path>) -> Vec<(&'static str, std::result::Result<String, String>)> {
    FIXTURES
        .iter()
        .map(|&(name, builtin)| {
            let text = match dir {
                None => Ok(builtin.to_string()),
                Some(d) => {
                    let p = d.join(format!("{name}.json"));
                    std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))
                }
            };
            (name, text)
        })
        .collect()
}

fn criterion_rng(seed: u64, id: u64) -> Prng {
    seeded(seed ^ id.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn run_criterion(id: u64, f: CriterionFn, cfg: &Config) -> Vec<Check> {
    let mut rng = criterion_rng(cfg.seed, id);
    match f(&mut rng, &cfg.tol, cfg) {
        Ok(mut checks) => {
            for c in &mut checks {
                c.name = format!("c{id}.{}", c.name);
            }
            checks
        }
        Err(e) => vec![Check::flag(format!("c{id}.error: {e}"), false)],
    }
}

/// Runs every criterion and fixture; `--parallel` runs the criteria on
/// separate threads, each with its own PRNG, so results do not depend on it.
pub fn selftest(cfg: &Config, fixtures: &[(&str, std::result::Result<String, String>)], r: &mut Report) {
    let per_criterion: Vec<Vec<Check>> = if cfg.parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = CRITERIA
                .iter()
                .map(|&(id, f)| scope.spawn(move || run_criterion(id, f, cfg)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| vec![Check::flag("panic", false)]))
                .collect()
        })
    } else {
        CRITERIA.iter().map(|&(id, f)| run_criterion(id, f, cfg)).collect()
    };
    for checks in per_criterion {
        r.checks.extend(checks);
    }
    for (name, text) in fixtures {
        let ok = match text {
            Ok(t) => fixture_check(name, t, &cfg.tol),
            Err(_) => None,
        };
        let mut c = Check::flag(format!("fixture.{name}"), ok.is_some_and(|(pass, _)| pass));
        if let Some((_, Some(w))) = ok {
            c = c.with_witness(w);
        }
        r.check(c);
    }
    r.dim("criteria", CRITERIA.len()).dim("fixtures", fixtures.len());
}

/// `Some((pass, witness))` for a parsable fixture.
fn fixture_check(name: &str, text: &str, tol: &Tolerance) -> Option<(bool, Option<f64>)> {
    match name {
        "pd_ok" | "pd_bad" => {
            let k = parse_json::<KernelJson>(text).ok()?.to_kernel(tol).ok()?;
            let w = k.is_pd(tol).ok()?;
            let pass = if name == "pd_ok" {
                w.holds
            } else {
                !w.holds && (w.min_eigenvalue + 1.0).abs() <= 1e-12
            };
            Some((pass, Some(w.min_eigenvalue)))
        }
        "cpd_identity" | "cpd_transpose" => {
            let k = parse_json::<MapKernelJson>(text).ok()?.to_kernel(tol).ok()?;
            let w = k.is_cpd(tol).ok()?;
            let pass = if name == "cpd_identity" {
                w.holds
            } else {
                !w.holds && (w.min_eigenvalue + 1.0).abs() <= 1e-12
            };
            Some((pass, Some(w.min_eigenvalue)))
        }
        "spositive" => {
            let (s_pos, spectral) = spositive_fixture(text, tol)?;
            Some((s_pos && !spectral, None))
        }
        _ => None,
    }
}

/// `(𝒮-positive, spectrally positive)` for the element of a fixture over a
/// commutative algebra `ℂ^d` given in its standard basis.
fn spositive_fixture(text: &str, tol: &Tolerance) -> Option<(bool, bool)> {
    let p = parse_json::<StarProblemJson>(text).ok()?;
    let alg = p.algebra(tol).ok()?;
    let set = p.functional_set(&alg, tol).ok()?;
    let b = p.element().ok()?;
    let s_pos = is_s_positive(&b, &alg, &set, tol).ok()?.positive;
    let diag = AlgebraShape::new(vec![1; alg.dim()]).ok()?;
    if StarAlgebra::from_shape(&diag).left() != alg.left() {
        return None;
    }
    let spectral = AlgElement::from_coords(&diag, &b).ok()?.is_positive(tol).positive;
    Some((s_pos, spectral))
}

fn eps_rank(h: &CMatrix, tol: &Tolerance) -> Result<usize> {
    let eig = eig_hermitian(h, tol)?;
    let norm = eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(eig.values.iter().filter(|&&x| x > tol.threshold(norm)).count())
}

fn kolmogorov_roundtrip(rng: &mut Prng, tol: &Tolerance, _: &Config) -> Result<Vec<Check>> {
    let start = Instant::now();
    let (mut worst, mut ranks) = (0.0f64, true);
    for _ in 0..500 {
        let shape = shape_up_to(rng, (3, 2));
        let n = index(rng, 1, 5);
        let (k, _) = pd_kernel(rng, &shape, n, 4, tol)?;
        let d = k.kolmogorov(tol)?;
        worst = worst.max(d.reconstruction_error(&k)?);
        for b in 0..shape.num_blocks() {
            ranks &= d.module.ambient()[b] == eps_rank(&k.gram_block(b), tol)?;
        }
    }
    Ok(vec![
        Check::new("reconstruction", worst, 1e-10),
        Check::flag("ambient_rank", ranks),
        Check::new("runtime_s", start.elapsed().as_secs_f64(), 10.0),
    ])
}

fn universal_property(rng: &mut Prng, tol: &Tolerance, _: &Config) -> Result<Vec<Check>> {
    let (mut iso, mut round, mut points) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let shape = shape_up_to(rng, (3, 2));
        let n = index(rng, 1, 4);
        let (k, xs) = pd_kernel(rng, &shape, n, 4, tol)?;
        let first = k.kolmogorov(tol)?;
        let sub = submodule_from_generators(xs[0].module(), &xs, tol)?;
        let second = Decomposition::new(sub.module, sub.coordinates, true)?;
        let there = universal_isometry(&first, &second, tol)?;
        let back = universal_isometry(&second, &first, tol)?;
        iso = iso.max(there.isometry_residual()).max(back.isometry_residual());
        round = round
            .max(back.compose(&there)?.max_diff(&AdjointableOp::identity(&first.module))?)
            .max(there.compose(&back)?.max_diff(&AdjointableOp::identity(&second.module))?);
        for (x, y) in first.point_map.iter().zip(&second.point_map) {
            points = points.max(there.apply(x)?.max_diff(y)?);
        }
    }
    Ok(vec![
        Check::new("isometry", iso, 1e-9),
        Check::new("round_trip", round, 1e-9),
        Check::new("points", points, 1e-9),
    ])
}

fn cpd_kolmogorov(rng: &mut Prng, tol: &Tolerance, _: &Config) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let a = shape_with_dim(rng, 9);
        let b = shape_with_dim(rng, 9);
        let n = index(rng, 1, 3);
        let k = cpd_kernel(rng, &a, &b, n, 2, tol)?;
        worst = worst.max(gns(&k, tol)?.reconstruction_error(&k)?);
    }
    Ok(vec![Check::new("reconstruction", worst, 1e-10)])
}

fn composition_closure(rng: &mut Prng, tol: &Tolerance, _: &Config) -> Result<Vec<Check>> {
    let (mut cpd, mut iso, mut le, mut strict) = (true, 0.0f64, true, false);
    for _ in 0..200 {
        let a = shape_with_dim(rng, 5);
        let b = shape_with_dim(rng, 5);
        let c = shape_with_dim(rng, 5);
        let n = index(rng, 1, 3);
        let k = cpd_kernel(rng, &a, &b, n, 2, tol)?;
        let l = cpd_kernel(rng, &b, &c, n, 2, tol)?;
        cpd &= schur_compose(&l, &k, tol)?.is_cpd(tol)?.holds;
        let ce = compose_embedding(&l, &k, tol)?;
        iso = iso.max(ce.isometry_residual);
        le &= ce.dim_composed <= ce.dim_product;
        strict |= ce.dim_composed < ce.dim_product;
    }
    Ok(vec![
        Check::flag("is_cpd", cpd),
        Check::new("embedding_isometry", iso, 1e-10),
        Check::flag("dimension", le),
        Check::flag("strict_dimension_seen", strict),
    ])
}

fn tensor_identity(rng: &mut Prng, tol: &Tolerance, _: &Config) -> Result<Vec<Check>> {
    let (mut ident, mut assoc) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        let a = shape_with_dim(rng, 5);
        let b = shape_with_dim(rng, 5);
        let c = shape_with_dim(rng, 5);
        let d = shape_with_dim(rng, 4);
        let e = correspondence(rng, &a, &b, 2)?;
        let f = correspondence(rng, &b, &c, 2)?;
        let g = correspondence(rng, &c, &d, 1)?;
        let (ef, ef_map) = tensor(&e, &f, tol)?;
        let xs = vectors(rng, e.module(), 2);
        let ys = vectors(rng, f.module(), 2);
        let zs = vectors(rng, g.module(), 2);
        let lhs = ef_map.embed(&xs[0], &ys[0])?.inner(&ef_map.embed(&xs[1], &ys[1])?)?;
        let rhs = ys[0].inner(&f.apply(&xs[0].inner(&xs[1])?, &ys[1])?)?;
        ident = ident.max(lhs.max_diff(&rhs)?);
        // (x ⊙ y) ⊙ z against x ⊙ (y ⊙ z)
        let (_, efg_map) = tensor(&ef, &g, tol)?;
        let (fg, fg_map) = tensor(&f, &g, tol)?;
        let (_, e_fg_map) = tensor(&e, &fg, tol)?;
        let left: Vec<_> = (0..2)
            .map(|i| efg_map.embed(&ef_map.embed(&xs[i], &ys[i])?, &zs[i]))
            .collect::<Result<_>>()?;
        let right: Vec<_> = (0..2)
            .map(|i| e_fg_map.embed(&xs[i], &fg_map.embed(&ys[i], &zs[i])?))
            .collect::<Result<_>>()?;
        for i in 0..2 {
            for j in 0..2 {
                assoc = assoc.max(left[i].inner(&left[j])?.max_diff(&right[i].inner(&right[j])?)?);
            }
        }
    }
    Ok(vec![Check::new("inner_product", ident, 1e-10), Check::new("associativity", assoc, 1e-10)])
}

fn gram_positivity(rng: &mut Prng, tol: &Tolerance, _: &Config) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let shape = shape_up_to(rng, (3, 2));
        let m = module(rng, &shape, 4);
        let count = index(rng, 1, 5);
        let g = gram_element(&vectors(rng, &m, count))?;
        let p = g.is_positive(tol);
        worst = worst.max((-p.min_eigenvalue).max(0.0) / g.norm().max(f64::MIN_POSITIVE));
    }
    Ok(vec![Check::new("relative_negativity", worst, 1e-9)])
}

fn stinespring_identity(rng: &mut Prng, tol: &Tolerance, _: &Config) -> Result<Vec<Check>> {
    let (mut ident, mut mult, mut star) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..200 {
        let a = shape_with_dim(rng, 5);
        let b = shape_with_dim(rng, 5);
        let n = index(rng, 1, 3);
        let k = cpd_kernel(rng, &a, &b, n, 2, tol)?;
        let f = default_target(&b);
        let st = stinespring(&k, &f, tol)?;
        ident = ident.max(st.identity_residual(&k, &f)?);
        let (m, s) = st.rho_residual();
        mult = mult.max(m);
        star = star.max(s);
    }
    Ok(vec![
        Check::new("dilation", ident, 1e-10),
        Check::new("multiplicative", mult, 1e-10),
        Check::new("star", star, 1e-10),
    ])
}

fn phi_map_uniqueness(rng: &mut Prng, tol: &Tolerance, _: &Config) -> Result<Vec<Check>> {
    let (mut props, mut tw) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let blocks = shape_up_to(rng, (2, 2)).blocks().to_vec();
        let mut ambient: Vec<usize> = blocks.iter().map(|_| index(rng, 0, 2)).collect();
        if ambient.iter().all(|&d| d == 0) {
            ambient[0] = 1;
        }
        let (h1, m, extra) = (index(rng, 1, 3), index(rng, 1, 2), index(rng, 0, 2));
        let input = phi_map_dilation(rng, &blocks, &ambient, h1, m, extra)?;
        let a = phi_map_sextuple(&input, tol)?;
        props = props.max(a.residuals.max());
        let us: Vec<CMatrix> = a.gns.corr.module().ambient().iter().map(|&d| random_unitary(rng, d)).collect();
        let b = phi_map_sextuple_with(&input, rotate_gns(&a.gns, &us, tol)?, tol)?;
        props = props.max(b.residuals.max());
        tw = tw.max(sextuple_intertwiner(&a, &b, &input, tol)?.residual);
    }
    Ok(vec![Check::new("properties", props, 1e-10), Check::new("intertwiner", tw, 1e-9)])
}

fn schoenberg_correspondence(rng: &mut Prng, tol: &Tolerance, cfg: &Config) -> Result<Vec<Check>> {
    let start = Instant::now();
    let grid = &cfg.time_grid;
    let (mut pd, mut exact, mut recon, mut fock) = (true, true, 0.0f64, f64::NEG_INFINITY);
    let zero = C64::new(0.0, 0.0);
    for _ in 0..200 {
        let n = index(rng, 1, 5);
        let l = cond_pd_generator(rng, n, tol)?;
        pd &= l.is_cond_pd(tol)?.holds;
        pd &= l.pd_on_grid(grid, tol)?.iter().all(|(_, w)| w.holds);
        let base = index(rng, 0, n - 1);
        let sd = l.schoenberg_normalize(base, tol)?;
        exact &= sd.beta[base].im == 0.0;
        exact &= sd.point(base).iter().all(|z| *z == zero);
        for s in 0..n {
            exact &= sd.normalized[(base, s)] == zero && sd.normalized[(s, base)] == zero;
        }
        for &t in grid {
            let e = l.schur_exp(t);
            for (x, y) in e.iter().zip(sd.reconstruct(t).iter()) {
                recon = recon.max((y - x).norm() / x.norm().max(1.0));
            }
            let r = fock_exponential_report(&l, &sd, t, cfg.fock_level, cfg.max_sym_basis)?;
            fock = fock.max(r.excess());
        }
    }
    Ok(vec![
        Check::flag("pd_on_grid", pd),
        Check::flag("normalization_exact", exact),
        Check::new("reconstruction", recon, RECONSTRUCTION_TOL),
        Check::new("fock_excess", fock.max(0.0), FOCK_SLACK).with_witness(fock),
        Check::new("runtime_s", start.elapsed().as_secs_f64(), 30.0),
    ])
}

fn subproduct_units(rng: &mut Prng, tol: &Tolerance, cfg: &Config) -> Result<Vec<Check>> {
    let grid = &cfg.time_grid;
    let (mut unit, mut emb, mut assoc, mut dims, mut unitary) = (0.0f64, 0.0f64, 0.0f64, true, true);
    for i in 0..20 {
        let dim = 2 + i % 2;
        // automorphism groups, or a full set of jump operators
        let jumps = if i % 4 < 2 { 0 } else { dim * dim - 1 };
        let gen = lindblad(rng, dim, jumps)?;
        let s = grid[index(rng, 0, grid.len() - 1)];
        let t = grid[index(rng, 0, grid.len() - 1)];
        let r = subproduct_check(&gen, s, t, rng, PROBES, tol)?;
        unit = unit.max(r.unit_residual);
        emb = emb.max(r.gram_mismatch).max(r.residual).max(r.isometry_residual);
        assoc = assoc.max(r.assoc_gram_mismatch).max(r.assoc_unit_residual);
        dims &= r.assoc_dims_equal && r.dim_sum <= r.dim_product;
        if jumps == 0 {
            unitary &= r.is_unitary(1e-9);
        }
    }
    Ok(vec![
        Check::new("unit", unit, 1e-9),
        Check::new("embedding", emb, 1e-9),
        Check::new("associativity", assoc, 1e-9),
        Check::flag("dimensions", dims),
        Check::flag("automorphism_unitary", unitary),
    ])
}

fn s_positivity(rng: &mut Prng, tol: &Tolerance, _: &Config) -> Result<Vec<Check>> {
    let mut disagreements = 0usize;
    for trial in 0..1000 {
        let n = 2 + trial % 2;
        let shape = AlgebraShape::full(n)?;
        let alg = StarAlgebra::from_shape(&shape);
        let state = Functional::new(shape.clone(), vec![faithful_density(rng, n)], tol)?;
        let set = FunctionalSet::from_functionals(&shape, &[state])?;
        let b = AlgElement::new(shape, vec![hermitian_mix(rng, n, 1e-4)])?;
        if is_s_positive(&b.coords(), &alg, &set, tol)?.positive != b.is_positive(tol).positive {
            disagreements += 1;
        }
    }
    let fixture = FIXTURES.iter().find(|(n, _)| *n == "spositive").map(|(_, t)| *t).unwrap_or("");
    let fixture_ok = spositive_fixture(fixture, tol) == Some((true, false));
    let mut sqrt = 0.0f64;
    for _ in 0..100 {
        let shape = shape_with_dim(rng, 9);
        let alg = StarAlgebra::from_shape(&shape);
        let densities = shape
            .blocks()
            .iter()
            .map(|&n| {
                let rank = index(rng, 1, n);
                let g = random_cmatrix(rng, n, rank);
                &g * g.adjoint()
            })
            .collect();
        let set = FunctionalSet::from_functionals(&shape, &[Functional::new(shape.clone(), densities, tol)?])?;
        let a = element(rng, &shape);
        let b = a.adjoint().mul(&a)?;
        sqrt = sqrt.max(s_square_root(&b.coords(), &alg, &set, tol)?.residual);
    }
    let mut kol = 0.0f64;
    for _ in 0..50 {
        let sa = shape_with_dim(rng, 4);
        let sb = shape_with_dim(rng, 4);
        let n = index(rng, 1, 2);
        let k = cpd_kernel(rng, &sa, &sb, n, 2, tol)?;
        let entries = k.entries().iter().map(|m: &LinMap| m.action().clone()).collect();
        let sk = StarKernel::new(k.points().to_vec(), entries)?;
        let state = Functional::new(
            sb.clone(),
            sb.blocks().iter().map(|&m| faithful_density(rng, m)).collect(),
            tol,
        )?;
        let set = FunctionalSet::from_functionals(&sb, &[state])?;
        let dec = kolmogorov_star(&StarAlgebra::from_shape(&sa), &sk, &StarAlgebra::from_shape(&sb), &set, tol)?;
        kol = kol.max(dec.residual);
    }
    Ok(vec![
        Check::new("disagreements", disagreements as f64, 0.0),
        Check::flag("fixture_one_minus_one", fixture_ok),
        Check::new("square_root", sqrt, 1e-10),
        Check::new("kolmogorov_star", kol, 1e-9),
    ])
}
