use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use opkernel_core::cpd::LinMap;
use opkernel_core::json::{
    kernel_json, map_kernel_json, LinMapJson, MatrixJson, ModuleJson, PhiMapJson, SandwichJson, ScalarGeneratorJson,
};
use opkernel_core::kernels::default_labels;
use opkernel_core::modcorr::Dual;
use opkernel_core::numerics::CMatrix;
use opkernel_core::random::seeded;
use opkernel_core::samples::{
    cond_pd_generator, correspondence, cpd_kernel, lindblad, module, pd_kernel, phi_map_dilation,
};
use opkernel_core::{AlgebraShape, Tolerance, C64};
use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn opkernel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opkernel"))
        .args(args)
        .env_remove("OPKERNEL_TOL")
        .output()
        .unwrap()
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = opkernel(args);
    let code = out.status.code().unwrap();
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, report)
}

fn write_json(dir: &TempDir, name: &str, value: &impl serde::Serialize) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name} in {report}"))
}

fn all_pass(report: &Value) -> bool {
    report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true)
}

fn without_timing(mut report: Value) -> Value {
    report.as_object_mut().unwrap().remove("timing");
    report
}

#[test]
fn pd_fixture_passes() {
    let (code, report) = run(&["check", "pd", fixture("pd_ok.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(check(&report, "pd")["pass"], true);
    assert!(check(&report, "pd")["witness"].as_f64().unwrap() > 0.0);
    assert_eq!(report["command"][0], "check");
}

#[test]
fn non_pd_fixture_fails_with_eigenvalue_witness() {
    let (code, report) = run(&["check", "pd", fixture("pd_bad.json").to_str().unwrap()]);
    assert_eq!(code, 1);
    let c = check(&report, "pd");
    assert_eq!(c["pass"], false);
    assert!((c["witness"].as_f64().unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn transpose_is_not_cpd() {
    let (code, _) = run(&["check", "cpd", fixture("cpd_identity.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, report) = run(&["check", "cpd", fixture("cpd_transpose.json").to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!((check(&report, "cpd")["witness"].as_f64().unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn usage_and_input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(opkernel(&["check", "pd", bad.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(opkernel(&["check", "pd", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(opkernel(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(opkernel(&["check", "pd"]).status.code(), Some(2));
    let ok = fixture("pd_ok.json");
    assert_eq!(opkernel(&["--tol", "nope", "check", "pd", ok.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(opkernel(&["--help"]).status.code(), Some(0));
}

#[test]
fn non_hermitian_kernel_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(fixture("pd_ok.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["entries"]["a|b"][0]["re"][0] = 5.0.into();
    let path = write_json(&dir, "k.json", &v);
    assert_eq!(opkernel(&["check", "pd", &path]).status.code(), Some(2));
}

#[test]
fn tolerance_from_environment() {
    let ok = fixture("pd_ok.json");
    let with_env = |val: &str| {
        Command::new(env!("CARGO_BIN_EXE_opkernel"))
            .args(["check", "pd", ok.to_str().unwrap()])
            .env("OPKERNEL_TOL", val)
            .output()
            .unwrap()
    };
    assert_eq!(with_env("1e-6").status.code(), Some(0));
    assert_eq!(with_env("1e-6,1e-14").status.code(), Some(0));
    assert_eq!(with_env("abc").status.code(), Some(2));
    assert_eq!(with_env("-1").status.code(), Some(2));
    let report: Value = serde_json::from_slice(&with_env("1e-6").stdout).unwrap();
    // threshold = max(abs, rel·‖k‖) with ‖k‖ = 3
    assert!((check(&report, "pd")["tolerance"].as_f64().unwrap() - 3e-6).abs() < 1e-18);
}

#[test]
fn output_flag_writes_report_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let o = opkernel(&["kolmogorov", fixture("pd_ok.json").to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(all_pass(&report));
    assert!(report["result"].is_object());
}

#[test]
fn floats_print_with_seventeen_digits() {
    let o = opkernel(&["check", "pd", fixture("pd_ok.json").to_str().unwrap()]);
    let text = String::from_utf8(o.stdout).unwrap();
    // the witness is the smallest eigenvalue 1 of [[2,1],[1,2]]
    assert!(text.contains("\"witness\": 1.0000000000000000e0"), "{text}");
}

#[test]
fn cpd_commands_on_generated_kernels() {
    let dir = TempDir::new().unwrap();
    let tol = Tolerance::default();
    let mut rng = seeded(41);
    let a = AlgebraShape::new(vec![2, 1]).unwrap();
    let b = AlgebraShape::full(2).unwrap();
    let c = AlgebraShape::new(vec![1, 1]).unwrap();
    let k = cpd_kernel(&mut rng, &a, &b, 2, 2, &tol).unwrap();
    let l = cpd_kernel(&mut rng, &b, &c, 2, 2, &tol).unwrap();
    let kp = write_json(&dir, "k.json", &map_kernel_json(&k));
    let lp = write_json(&dir, "l.json", &map_kernel_json(&l));
    for args in [
        vec!["check", "cpd", kp.as_str()],
        vec!["gns", kp.as_str()],
        vec!["stinespring", kp.as_str()],
        vec!["compose", "-l", lp.as_str(), "-k", kp.as_str()],
    ] {
        let (code, report) = run(&args);
        assert_eq!(code, 0, "{args:?}: {report}");
        assert!(all_pass(&report));
    }
    // the order matters: K ∘ L does not compose
    assert_eq!(opkernel(&["compose", "-l", &kp, "-k", &lp]).status.code(), Some(2));
}

#[test]
fn kolmogorov_reconstructs_generated_kernel() {
    let dir = TempDir::new().unwrap();
    let tol = Tolerance::default();
    let mut rng = seeded(42);
    let shape = AlgebraShape::new(vec![2, 1]).unwrap();
    let (k, _) = pd_kernel(&mut rng, &shape, 3, 2, &tol).unwrap();
    let path = write_json(&dir, "k.json", &kernel_json(&k));
    let (code, report) = run(&["kolmogorov", &path]);
    assert_eq!(code, 0, "{report}");
    assert!(check(&report, "reconstruction")["residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn phimap_and_sandwich() {
    let dir = TempDir::new().unwrap();
    let mut rng = seeded(43);
    let input = phi_map_dilation(&mut rng, &[2, 1], &[1, 1], 2, 1, 1).unwrap();
    let j = PhiMapJson {
        module: ModuleJson::from_module(&input.module),
        h1: input.h1,
        h2: input.h2,
        t: MatrixJson::from(&input.t),
        phi: LinMapJson::from(&input.phi),
    };
    let (code, report) = run(&["phimap", &write_json(&dir, "phi.json", &j)]);
    assert_eq!(code, 0, "{report}");
    assert!(report["dims"]["k1"].as_u64().unwrap() > 0);

    let shape = AlgebraShape::new(vec![2, 1]).unwrap();
    let m = module(&mut rng, &shape, 2);
    let dual = Dual::new(&m).unwrap();
    let inner = correspondence(&mut rng, dual.compacts(), dual.compacts(), 2).unwrap();
    let j = SandwichJson {
        module: ModuleJson::from_module(&m),
        inner: ModuleJson::from_correspondence(&inner),
    };
    let path = write_json(&dir, "sandwich.json", &j);
    let (code, report) = run(&["sandwich", &path]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["result"]["right"], serde_json::to_value(ModuleJson::from_module(&m).right).unwrap());
}

#[test]
fn schoenberg_accepts_conditionally_pd_generators_only() {
    let dir = TempDir::new().unwrap();
    let tol = Tolerance::default();
    let mut rng = seeded(44);
    let l = cond_pd_generator(&mut rng, 3, &tol).unwrap();
    let good = ScalarGeneratorJson {
        points: default_labels(3),
        matrix: MatrixJson::from(l.matrix()),
    };
    let path = write_json(&dir, "good.json", &good);
    let (code, report) = run(&["schoenberg", &path, "--times", "0.5,2", "--fock-n", "25"]);
    assert_eq!(code, 0, "{report}");
    assert!(check(&report, "fock[t=0.5]")["pass"] == true);
    assert_eq!(report["result"]["base"], good.points[0]);
    assert_eq!(opkernel(&["schoenberg", &path, "--base", "nowhere"]).status.code(), Some(2));

    let off = CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let bad = ScalarGeneratorJson {
        points: default_labels(2),
        matrix: MatrixJson::from(&off),
    };
    let (code, report) = run(&["schoenberg", &write_json(&dir, "bad.json", &bad)]);
    assert_eq!(code, 1);
    assert_eq!(check(&report, "cond_pd")["pass"], false);
}

#[test]
fn semigroup_for_cp_and_cpd_generators() {
    let dir = TempDir::new().unwrap();
    let tol = Tolerance::default();
    let mut rng = seeded(45);
    let gen = lindblad(&mut rng, 2, 3).unwrap();
    let path = write_json(&dir, "lindblad.json", &LinMapJson::from(gen.map()));
    let (code, report) = run(&["semigroup", &path, "--times", "0.25,0.5"]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["result"]["unitary"], false);

    let auto = lindblad(&mut rng, 2, 0).unwrap();
    let path = write_json(&dir, "auto.json", &LinMapJson::from(auto.map()));
    let (code, report) = run(&["semigroup", &path, "--times", "1,2"]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["result"]["unitary"], true);

    // a CPD generator: small Schur-exponentiable kernel of maps
    let shape = AlgebraShape::full(2).unwrap();
    let k = cpd_kernel(&mut rng, &shape, &shape, 2, 1, &tol).unwrap();
    let path = write_json(&dir, "cpd.json", &map_kernel_json(&k));
    let (code, report) = run(&["semigroup", &path, "--times", "0.1,0.2"]);
    assert_eq!(code, 0, "{report}");
    assert!(check(&report, "dimension")["pass"] == true);

    assert_eq!(opkernel(&["semigroup", &path, "--times", "0.1"]).status.code(), Some(2));
    assert_eq!(opkernel(&["semigroup", &path, "--times", "-1,2"]).status.code(), Some(2));
    let transpose = LinMapJson::from(&LinMap::transpose(&shape));
    let (code, _) = run(&["semigroup", &write_json(&dir, "t.json", &transpose), "--times", "0.1,0.2"]);
    assert_eq!(code, 1);
}

#[test]
fn star_commands_on_fixture() {
    let f = fixture("spositive.json");
    let f = f.to_str().unwrap();
    let (code, report) = run(&["star", "spositive", f]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(check(&report, "s_positive")["pass"], true);
    let (code, report) = run(&["star", "separated", f]);
    assert_eq!(code, 1, "{report}");
    let (code, report) = run(&["star", "gns", f]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["dims"]["gns"], 1);
    let (code, report) = run(&["star", "sqrt", f]);
    assert_eq!(code, 0, "{report}");
    assert!(report["result"].is_object());
}

#[test]
fn reports_are_reproducible_for_a_seed() {
    let dir = TempDir::new().unwrap();
    let mut rng = seeded(46);
    let shape = AlgebraShape::new(vec![2, 1]).unwrap();
    let m = module(&mut rng, &shape, 2);
    let dual = Dual::new(&m).unwrap();
    let inner = correspondence(&mut rng, dual.compacts(), dual.compacts(), 2).unwrap();
    let j = SandwichJson {
        module: ModuleJson::from_module(&m),
        inner: ModuleJson::from_correspondence(&inner),
    };
    let path = write_json(&dir, "sandwich.json", &j);
    let a = run(&["--seed", "7", "sandwich", &path]).1;
    let b = run(&["--seed", "7", "sandwich", &path]).1;
    assert_eq!(without_timing(a), without_timing(b));
}

#[test]
fn selftest_names_a_corrupted_fixture() {
    let dir = TempDir::new().unwrap();
    for name in ["pd_ok", "pd_bad", "cpd_identity", "cpd_transpose", "spositive"] {
        std::fs::copy(fixture(&format!("{name}.json")), dir.path().join(format!("{name}.json"))).unwrap();
    }
    std::fs::write(dir.path().join("cpd_transpose.json"), "[]").unwrap();
    let (code, report) = run(&["selftest", "--fixtures", dir.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["fixture.cpd_transpose"]);
}
