//! Subcommand implementations. Each one fills a [`Report`]; errors that are
//! not input errors are turned into failed checks by the caller.

use std::path::Path;

use opkernel_core::cpd::{
    compose_embedding, default_target, gns, gns_generator_count, morita_sandwich, phi_map_sextuple,
    sandwich_compatibility, schur_compose, stinespring, MapKernel, PhiMapInput,
};
use opkernel_core::json::{
    decomposition_json, map_kernel_json, vector_json, KernelJson, LinMapJson, MapKernelJson, MatrixJson,
    ModuleJson, OrderedEntries, PhiMapJson, SandwichJson, ScalarGeneratorJson, StarProblemJson,
};
use opkernel_core::numerics::max_abs;
use opkernel_core::random::seeded;
use opkernel_core::semigroups::{
    cpd_on_grid, cpd_semigroup_check, fock_exponential_report, subproduct_check, SemigroupGenerator,
};
use opkernel_core::starpos::{is_s_positive, is_s_separated, kolmogorov_star, s_square_root, GnsRep};
use opkernel_core::{Error, Result, C64};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use crate::config::Config;
use crate::report::{Check, Report};

/// Relative bound on `|𝔱_t - reconstruction| / max(1, |𝔱_t|)`.
pub const RECONSTRUCTION_TOL: f64 = 1e-12;
/// Slack on top of the analytic Fock tail bound.
pub const FOCK_SLACK: f64 = 1e-12;
/// Random probe vectors for associativity and compatibility checks.
pub const PROBES: usize = 3;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    parse_json(&text).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> std::result::Result<T, serde_json::Error> {
    serde_json::from_str(text)
}

fn value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn map_kernel(cfg: &Config, path: &Path) -> Result<MapKernel> {
    let k = read_json::<MapKernelJson>(path)?.to_kernel(&cfg.tol)?;
    k.check_cap(cfg.max_points)?;
    let count = gns_generator_count(&k);
    if count > cfg.max_generators {
        return Err(Error::CapExceeded {
            what: format!("GNS generator count {count}"),
            cap: cfg.max_generators,
        });
    }
    Ok(k)
}

fn time_label(t: f64) -> String {
    format!("t={t}")
}

pub fn check_pd(cfg: &Config, path: &Path, r: &mut Report) -> Result<()> {
    let k = read_json::<KernelJson>(path)?.to_kernel(&cfg.tol)?;
    k.check_cap(cfg.max_points)?;
    r.dim("points", k.len()).dim("algebra", k.shape().dim());
    let w = k.is_pd(&cfg.tol)?;
    r.check(Check::spectral("pd", w.min_eigenvalue, w.threshold));
    Ok(())
}

pub fn check_cpd(cfg: &Config, path: &Path, r: &mut Report) -> Result<()> {
    let k = map_kernel(cfg, path)?;
    r.dim("points", k.len())
        .dim("from", k.from_shape().dim())
        .dim("to", k.to_shape().dim());
    let w = k.is_cpd(&cfg.tol)?;
    r.check(Check::spectral("cpd", w.min_eigenvalue, w.threshold));
    Ok(())
}

pub fn kolmogorov(cfg: &Config, path: &Path, r: &mut Report) -> Result<()> {
    let k = read_json::<KernelJson>(path)?.to_kernel(&cfg.tol)?;
    k.check_cap(cfg.max_points)?;
    r.dim("points", k.len());
    let w = k.is_pd(&cfg.tol)?;
    r.check(Check::spectral("pd", w.min_eigenvalue, w.threshold));
    if !w.holds {
        return Ok(());
    }
    let d = k.kolmogorov(&cfg.tol)?;
    r.check(Check::new("reconstruction", d.reconstruction_error(&k)?, cfg.limit(k.norm())));
    r.dim("module", d.module.dim());
    r.result = Some(value(&decomposition_json(k.points(), &d)));
    Ok(())
}

pub fn gns_cmd(cfg: &Config, path: &Path, r: &mut Report) -> Result<()> {
    let k = map_kernel(cfg, path)?;
    r.dim("points", k.len());
    let w = k.is_cpd(&cfg.tol)?;
    r.check(Check::spectral("cpd", w.min_eigenvalue, w.threshold));
    if !w.holds {
        return Ok(());
    }
    let data = gns(&k, &cfg.tol)?;
    r.check(Check::new("reconstruction", data.reconstruction_error(&k)?, cfg.limit(k.scale())));
    r.dim("module", data.corr.module().dim());
    let points = k.points().iter().cloned().zip(data.point_map.iter().map(vector_json)).collect();
    r.result = Some(json!({
        "correspondence": value(&ModuleJson::from_correspondence(&data.corr)),
        "point_map": value(&OrderedEntries(points)),
    }));
    Ok(())
}

pub fn compose(cfg: &Config, l_path: &Path, k_path: &Path, r: &mut Report) -> Result<()> {
    let l = map_kernel(cfg, l_path)?;
    let k = map_kernel(cfg, k_path)?;
    let lk = schur_compose(&l, &k, &cfg.tol)?;
    let w = lk.is_cpd(&cfg.tol)?;
    r.check(Check::spectral("cpd", w.min_eigenvalue, w.threshold));
    if !w.holds {
        return Ok(());
    }
    let ce = compose_embedding(&l, &k, &cfg.tol)?;
    let scale = k.scale() * l.scale();
    r.check(Check::new("gram", ce.gram_mismatch, cfg.limit(scale)))
        .check(Check::new("embedding", ce.residual, cfg.limit(scale)))
        .check(Check::new("isometry", ce.isometry_residual, cfg.limit(1.0)))
        .check(Check::flag("dimension", ce.dim_composed <= ce.dim_product));
    r.dim("composed", ce.dim_composed).dim("product", ce.dim_product);
    r.result = Some(value(&map_kernel_json(&lk)));
    Ok(())
}

pub fn stinespring_cmd(cfg: &Config, path: &Path, r: &mut Report) -> Result<()> {
    let k = map_kernel(cfg, path)?;
    let f = default_target(k.to_shape());
    let st = stinespring(&k, &f, &cfg.tol)?;
    let (mult, star) = st.rho_residual();
    r.check(Check::new("dilation", st.identity_residual(&k, &f)?, cfg.limit(k.scale())))
        .check(Check::new("multiplicative", mult, cfg.limit(1.0)))
        .check(Check::new("star", star, cfg.limit(1.0)));
    r.dim("gns", st.gns.corr.module().dim())
        .dim("space", st.space.module().dim());
    Ok(())
}

pub fn phimap(cfg: &Config, path: &Path, r: &mut Report) -> Result<()> {
    let j: PhiMapJson = read_json(path)?;
    let input = PhiMapInput::new(j.module.to_module()?, j.h1, j.h2, j.t.to_matrix()?, j.phi.to_map()?)?;
    let scale = max_abs(&input.t).powi(2).max(max_abs(input.phi.action()));
    r.dim("h1", input.h1).dim("h2", input.h2);
    r.check(Check::new("phi_map", input.phi_residual()?, cfg.limit(scale)));
    let w = input.phi.is_cp(&cfg.tol)?;
    r.check(Check::spectral("cp", w.min_eigenvalue, w.threshold));
    if !r.passed() {
        return Ok(());
    }
    let s = phi_map_sextuple(&input, &cfg.tol)?;
    let res = s.residuals;
    r.check(Check::new("dilation", res.dilation, cfg.limit(scale)))
        .check(Check::new("representation", res.representation, cfg.limit(scale)))
        .check(Check::new("nondegenerate", res.nondegenerate, cfg.limit(1.0)))
        .check(Check::new("coisometry", res.coisometry, cfg.limit(1.0)));
    r.dim("k1", s.k1_dim()).dim("k2", s.k2_dim());
    Ok(())
}

pub fn sandwich(cfg: &Config, path: &Path, r: &mut Report) -> Result<()> {
    let j: SandwichJson = read_json(path)?;
    let module = j.module.to_module()?;
    let inner = j.inner.to_correspondence(&cfg.tol)?;
    let s = morita_sandwich(&module, &inner, &cfg.tol)?;
    let (mult, star) = s.result.relation_residual();
    r.check(Check::new("multiplicative", mult, cfg.limit(1.0)))
        .check(Check::new("star", star, cfg.limit(1.0)));
    let mut rng = seeded(cfg.seed);
    let c = sandwich_compatibility(&module, &inner, &inner, &mut rng, PROBES, &cfg.tol)?;
    r.check(Check::flag("compatibility_dims", c.dims_equal))
        .check(Check::new("compatibility_gram", c.gram_mismatch, cfg.limit(1.0)));
    r.dim("module", module.dim()).dim("result", s.result.module().dim());
    r.result = Some(value(&ModuleJson::from_correspondence(&s.result)));
    Ok(())
}

pub fn schoenberg(
    cfg: &Config,
    path: &Path,
    base: Option<&str>,
    times: Option<&[f64]>,
    fock_n: Option<usize>,
    r: &mut Report,
) -> Result<()> {
    let l = read_json::<ScalarGeneratorJson>(path)?.to_generator(&cfg.tol)?;
    if l.len() > cfg.max_points {
        return Err(Error::CapExceeded {
            what: "points".into(),
            cap: cfg.max_points,
        });
    }
    let base = match base {
        None => 0,
        Some(label) => l
            .points()
            .iter()
            .position(|p| p == label)
            .ok_or_else(|| Error::Validation(format!("unknown base point {label:?}")))?,
    };
    let times = times.unwrap_or(&cfg.time_grid);
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::Validation("times must be finite and nonnegative".into()));
    }
    let level = fock_n.unwrap_or(cfg.fock_level);
    if level == 0 {
        return Err(Error::Validation("fock-n must be positive".into()));
    }
    let norm = max_abs(l.matrix());
    r.dim("points", l.len());
    let w = l.is_cond_pd(&cfg.tol)?;
    r.check(Check::spectral("cond_pd", w.min_eigenvalue, w.threshold));
    for (t, w) in l.pd_on_grid(times, &cfg.tol)? {
        r.check(Check::spectral(format!("pd[{}]", time_label(t)), w.min_eigenvalue, w.threshold));
    }
    if !r.passed() {
        return Ok(());
    }
    let sd = l.schoenberg_normalize(base, &cfg.tol)?;
    let n = l.len();
    let mut exact = sd.beta[base].im == 0.0;
    let mut identity = 0.0f64;
    let mut kolmogorov = 0.0f64;
    let zero = C64::new(0.0, 0.0);
    for s in 0..n {
        exact &= sd.normalized[(base, s)] == zero && sd.normalized[(s, base)] == zero;
        for u in 0..n {
            let expect = l.matrix()[(s, u)] + sd.beta[u] + sd.beta[s].conj();
            identity = identity.max((sd.normalized[(s, u)] - expect).norm());
            let ip: C64 = sd.point(s).iter().zip(sd.point(u)).map(|(a, b)| a.conj() * b).sum();
            kolmogorov = kolmogorov.max((ip - sd.normalized[(s, u)]).norm());
        }
    }
    r.check(Check::flag("normalization_exact", exact))
        .check(Check::new("normalization", identity, cfg.limit(norm)))
        .check(Check::new("kolmogorov", kolmogorov, cfg.limit(norm)));
    r.dim("kolmogorov", sd.dim());
    let mut bounds = Vec::with_capacity(times.len());
    for &t in times {
        let exact = l.schur_exp(t);
        let back = sd.reconstruct(t);
        let mut rel = 0.0f64;
        for (e, b) in exact.iter().zip(back.iter()) {
            rel = rel.max((b - e).norm() / e.norm().max(1.0));
        }
        r.check(Check::new(format!("reconstruction[{}]", time_label(t)), rel, RECONSTRUCTION_TOL));
        let f = fock_exponential_report(&l, &sd, t, level, cfg.max_sym_basis)?;
        r.check(Check::new(format!("fock[{}]", time_label(t)), f.excess().max(0.0), FOCK_SLACK).with_witness(f.max_bound()));
        r.dim("fock_basis", f.basis_size);
        bounds.push(json!({"t": t, "error": f.max_error(), "bound": f.max_bound()}));
    }
    let beta: Vec<[f64; 2]> = sd.beta.iter().map(|z| [z.re, z.im]).collect();
    r.result = Some(json!({
        "base": l.points()[base],
        "beta": beta,
        "normalized": value(&MatrixJson::from(&sd.normalized)),
        "fock": bounds,
    }));
    Ok(())
}

pub fn semigroup(cfg: &Config, path: &Path, times: &[f64], r: &mut Report) -> Result<()> {
    let [s, t] = times else {
        return Err(Error::Validation("--times takes exactly two values s,t".into()));
    };
    let (s, t) = (*s, *t);
    if !(s.is_finite() && t.is_finite() && s > 0.0 && t > 0.0) {
        return Err(Error::Validation("times must be finite and positive".into()));
    }
    let raw: serde_json::Value = read_json(path)?;
    let grid = [s, t, s + t];
    if raw.get("points").is_some() {
        let gen = map_kernel(cfg, path)?;
        for (time, w) in cpd_on_grid(&gen, &grid, &cfg.tol)? {
            r.check(Check::spectral(format!("cpd[{}]", time_label(time)), w.min_eigenvalue, w.threshold));
        }
        if !r.passed() {
            return Ok(());
        }
        let rep = cpd_semigroup_check(&gen, s, t, &cfg.tol)?;
        let scale = gen.scale();
        r.check(Check::new("unit", rep.unit_residual, cfg.limit(scale)))
            .check(Check::new("gram", rep.gram_mismatch, cfg.limit(scale)))
            .check(Check::new("embedding", rep.residual, cfg.limit(scale)))
            .check(Check::new("isometry", rep.isometry_residual, cfg.limit(1.0)))
            .check(Check::flag("dimension", rep.dim_sum <= rep.dim_product));
        r.dim("sum", rep.dim_sum).dim("product", rep.dim_product);
        return Ok(());
    }
    let map = read_json::<LinMapJson>(path)?.to_map()?;
    let gen = SemigroupGenerator::new(map)?;
    for (time, w) in gen.cp_on_grid(&grid, &cfg.tol)? {
        r.check(Check::spectral(format!("cp[{}]", time_label(time)), w.min_eigenvalue, w.threshold));
    }
    if !r.passed() {
        return Ok(());
    }
    let mut rng = seeded(cfg.seed);
    let rep = subproduct_check(&gen, s, t, &mut rng, PROBES, &cfg.tol)?;
    let scale = gen.at(s + t).action().norm().max(1.0);
    r.check(Check::new("unit", rep.unit_residual, cfg.limit(scale)))
        .check(Check::new("gram", rep.gram_mismatch, cfg.limit(scale)))
        .check(Check::new("embedding", rep.residual, cfg.limit(scale)))
        .check(Check::new("isometry", rep.isometry_residual, cfg.limit(1.0)))
        .check(Check::flag("dimension", rep.dim_sum <= rep.dim_product))
        .check(Check::new("assoc_gram", rep.assoc_gram_mismatch, cfg.limit(scale)))
        .check(Check::new("assoc_unit", rep.assoc_unit_residual, cfg.limit(scale)))
        .check(Check::flag("assoc_dims", rep.assoc_dims_equal));
    r.dim("s", rep.dim_s)
        .dim("t", rep.dim_t)
        .dim("sum", rep.dim_sum)
        .dim("product", rep.dim_product);
    r.result = Some(json!({ "unitary": rep.is_unitary(cfg.limit(1.0)) }));
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StarKind {
    Gns,
    Separated,
    Spositive,
    Sqrt,
}

pub fn star(cfg: &Config, kind: StarKind, path: &Path, r: &mut Report) -> Result<()> {
    let p: StarProblemJson = read_json(path)?;
    let alg = p.algebra(&cfg.tol)?;
    let set = p.functional_set(&alg, &cfg.tol)?;
    r.dim("algebra", alg.dim()).dim("functionals", set.len());
    match kind {
        StarKind::Gns => {
            let rep = GnsRep::new(&alg, &set, &cfg.tol)?;
            for (i, (c, phi)) in rep.components.iter().zip(set.functionals()).enumerate() {
                let scale = phi.iter().map(|z| z.norm()).fold(0.0, f64::max);
                r.check(Check::new(format!("gns[{i}]"), c.reconstruction_error(phi), cfg.limit(scale)));
            }
            r.dim("gns", rep.dim());
            if p.kernel.is_some() {
                let (source, k) = p.kernel(&cfg.tol)?;
                let dec = kolmogorov_star(&source, &k, &alg, &set, &cfg.tol)?;
                let scale = k.entries.iter().map(max_abs).fold(0.0, f64::max);
                r.check(Check::new("kolmogorov", dec.residual, cfg.limit(scale)));
                r.dim("kolmogorov", dec.dim());
            }
        }
        StarKind::Separated => {
            let sep = is_s_separated(&alg, &set, &cfg.tol)?;
            r.check(Check::flag("separated", sep.separated));
            r.dim("rank", sep.rank).dim("kernel", sep.kernel.len());
            let kernel: Vec<Vec<[f64; 2]>> = sep
                .kernel
                .iter()
                .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                .collect();
            r.result = Some(json!({ "kernel": kernel }));
        }
        StarKind::Spositive => {
            let b = p.element()?;
            let w = is_s_positive(&b, &alg, &set, &cfg.tol)?;
            r.check(Check::flag("hermitian", w.hermitian).with_witness(w.asymmetry))
                .check(Check::flag("s_positive", w.positive).with_witness(w.min_eigenvalue));
        }
        StarKind::Sqrt => {
            let b = p.element()?;
            let root = s_square_root(&b, &alg, &set, &cfg.tol)?;
            let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
            r.check(Check::new("square_root", root.residual, cfg.limit(scale)));
            r.dim("rows", root.beta.nrows()).dim("cols", root.beta.ncols());
            r.result = Some(value(&MatrixJson::from(&root.beta)));
        }
    }
    Ok(())
}
