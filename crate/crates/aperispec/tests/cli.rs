use std::path::{Path, PathBuf};

use aperispec::cli::{run, EXIT_USAGE};
use aperispec::format::{ConfigurationSpec, ModelSpec};
use aperispec::CliError;
use aperispec_core::operators::assemble_bloch;
use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn cfg(name: &str) -> String {
    configs().join(name).to_str().unwrap().to_owned()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("aperispec").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let (code, out, err) = call(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(err.contains("Usage"), "{err}");
    assert_eq!(call(&[]).0, EXIT_USAGE);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn dist_reports_exact_value_and_flag() {
    let (code, out, _) = call(&["dist", &cfg("fibonacci_9.json"), &cfg("fibonacci_14.json"), "--rmax", "64"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["exact"], "1/17");
    assert_eq!(v["lower_bound"], false);
    assert_eq!(v["d"].as_f64().unwrap(), 1.0 / 17.0);
    // Identical subshifts only get the radius-limited upper bound.
    let (_, out, _) = call(&["dist", &cfg("fibonacci_9.json"), &cfg("fibonacci_9.json"), "--rmax", "64"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!((v["exact"].as_str(), v["lower_bound"].as_bool()), (Some("1/64"), Some(true)));
}

#[test]
fn dict_lists_fibonacci_factors() {
    let (code, out, err) = call(&["dict", &cfg("fibonacci_substitution.json"), "--shell", "2"]);
    assert_eq!(code, 0);
    assert!(err.is_empty());
    let words: Vec<&str> = out.lines().collect();
    assert_eq!(words, ["aabaa", "aabab", "abaab", "ababa", "baaba", "babaa"]);
}

#[test]
fn sampled_dictionaries_are_flagged() {
    let (code, out, err) = call(&["dict", &cfg("kohmoto.json"), "--shell", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 6);
    assert!(err.contains("sampled"), "{err}");
}

#[test]
fn spectrum_json_and_samples() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bands.csv");
    let (code, out, _) = call(&["spectrum", &cfg("schrodinger.json"), &cfg("period_two.json"), "--grid", "64", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let bands = v["bands"].as_array().unwrap();
    assert_eq!(bands.len(), 2);
    // λ = 1, potential (0, 1): edges (1 ± √17)/2 and 0, 1.
    let r17 = 17f64.sqrt();
    let edges: Vec<f64> = bands.iter().flat_map(|b| b.as_array().unwrap().iter().map(|x| x.as_f64().unwrap())).collect();
    for (e, x) in edges.iter().zip([(1.0 - r17) / 2.0, 0.0, 1.0, (1.0 + r17) / 2.0]) {
        assert!((e - x).abs() < 1e-8, "{edges:?}");
    }
    assert_eq!(v["meta"]["period"], 2);
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("theta,energy\n"));
    assert_eq!(text.lines().count(), 1 + 64 * 2);
}

#[test]
fn aperiodic_spectrum_request_is_a_domain_error() {
    let (code, _, err) = call(&["spectrum", &cfg("schrodinger.json"), &cfg("kohmoto.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("periodic"), "{err}");
}

#[test]
fn missing_file_is_a_domain_error() {
    let (code, _, err) = call(&["dist", "/nonexistent/a.json", "/nonexistent/b.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("/nonexistent/a.json"), "{err}");
}

#[test]
fn numerical_failures_map_to_exit_two() {
    let e: CliError = aperispec_core::Error::NoConvergence { theta: Some(0.5) }.into();
    assert_eq!(e.exit_code(), 2);
    let e: CliError = aperispec_core::Error::Precondition("r too small".into()).into();
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn bound_itemizes_constants() {
    let (code, out, _) = call(&["bound", &cfg("schrodinger.json"), &cfg("fibonacci_9.json"), &cfg("fibonacci_14.json"), "--rmax", "64"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["theorem"], "finite-range");
    assert_eq!(v["constants"]["C_dL"], 288.0);
    assert_eq!(v["constants"]["N_overlap"], 3);
    let expected = 288.0 * (1.0 + 2.0 * 2f64.sqrt()) / 17.0;
    assert!((v["bound"].as_f64().unwrap() - expected).abs() < 1e-9 * expected);
    assert_eq!(v["effective"].as_f64().unwrap(), v["fallback"].as_f64().unwrap().min(v["bound"].as_f64().unwrap()));

    let (code, out, _) = call(&["bound", &cfg("schrodinger.json"), &cfg("fibonacci_9.json"), &cfg("fibonacci_14.json"), "--growth", "1"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["theorem"], "infinite-range");
    assert_eq!(v["constants"]["C_H"], 1.0);
}

#[test]
fn growth_violation_is_reported() {
    // Radius 2 at hop distance 2 grows linearly with C_H = 1.
    let (code, _, err) = call(&["bound", &cfg("hopping_model.json"), &cfg("fibonacci_9.json"), &cfg("fibonacci_14.json"), "--growth", "1"]);
    assert_eq!(code, 0, "{err}");
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("wide.json");
    std::fs::write(
        &model,
        r#"{"N": 1, "beta": 1.0, "terms": [
            {"h": [1], "coef": {"kind": "constant", "value": 1.0, "radius": 5}},
            {"h": [-1], "coef": {"kind": "constant", "value": 1.0, "radius": 5}}]}"#,
    )
    .unwrap();
    let (code, _, err) = call(&["bound", model.to_str().unwrap(), &cfg("fibonacci_9.json"), &cfg("fibonacci_14.json"), "--growth", "2"]);
    assert_eq!(code, 1);
    assert!(err.contains("linear-growth"), "{err}");
}

#[test]
fn sweep_writes_csv_dat_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let exp = dir.path().join("exp.json");
    std::fs::write(
        &exp,
        r#"{"model": {"schrodinger": {"lambda": 0.0}},
            "family": {"kind": "fibonacci_convergents", "k_min": 3, "k_max": 6, "k_ref": 8},
            "spectrum": {"grid": 64, "tol": 1e-10}, "r_max": 64}"#,
    )
    .unwrap();
    let (csv, dat, summary) = (dir.path().join("s.csv"), dir.path().join("s.dat"), dir.path().join("s.json"));
    let (code, out, err) = call(&[
        "sweep",
        exp.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
        "--dat",
        dat.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "schema,k,label,period,d_subshift,d_subshift_exact,lower_bound,d_spectral,bound,fallback,effective,ratio,sampled,status,reason"
    );
    // Free Laplacian: the spectrum ignores the configuration.
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0], "1");
        assert!(f[7].parse::<f64>().unwrap() < 1e-12, "{line}");
        assert_eq!(f[13], "pass");
    }
    let dat = std::fs::read_to_string(dat).unwrap();
    assert!(dat.starts_with("# schema 1\n"));
    assert_eq!(dat.lines().filter(|l| !l.starts_with('#')).count(), 4);
    let s: Value = serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap();
    assert_eq!(s["all_pass"], true);
    assert_eq!(s["rows"], 4);
}

#[test]
fn invalid_experiments_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let exp = dir.path().join("exp.json");
    for (body, needle) in [
        (r#""k_min": 6, "k_max": 5, "k_ref": 8"#, "k_min < k_max < k_ref"),
        (r#""k_min": 3, "k_max": 5, "k_ref": 5"#, "k_min < k_max < k_ref"),
    ] {
        std::fs::write(
            &exp,
            format!(
                r#"{{"model": {{"schrodinger": {{"lambda": 1.0}}}},
                    "family": {{"kind": "fibonacci_convergents", {body}}},
                    "spectrum": {{"grid": 64, "tol": 1e-10}}, "r_max": 64}}"#
            ),
        )
        .unwrap();
        let (code, _, err) = call(&["sweep", exp.to_str().unwrap()]);
        assert_eq!(code, 1);
        assert!(err.contains(needle), "{err}");
    }
    std::fs::write(
        &exp,
        r#"{"model": {"schrodinger": {"lambda": 1.0}},
            "family": {"kind": "fibonacci_convergents", "k_min": 3, "k_max": 5, "k_ref": 7},
            "spectrum": {"grid": 32, "tol": 1e-10}, "r_max": 4}"#,
    )
    .unwrap();
    let (code, _, err) = call(&["sweep", exp.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("grid >= 64"), "{err}");
}

#[test]
fn selftest_passes_and_is_reproducible() {
    let (code, a, _) = call(&["selftest", "--seed", "11"]);
    assert_eq!(code, 0);
    let (_, b, _) = call(&["selftest", "--seed", "11"]);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["seed"], 11);
    assert!(v["groups"].as_array().unwrap().iter().all(|g| g["passed"] == true));
}

#[test]
fn corrupted_metric_fails_the_alphabet_group() {
    let (code, out, _) = call(&["selftest", "--corrupt-metric"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    let failed: Vec<&Value> = v["groups"].as_array().unwrap().iter().filter(|g| g["passed"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["name"], "alphabet");
    assert!(failed[0]["failures"][0].as_str().unwrap().contains("triangle inequality"));
}

#[test]
fn general_model_matches_shorthand() {
    let x: ConfigurationSpec = serde_json::from_str(r#"{"configuration": {"kind": "fibonacci", "k": 6}}"#).unwrap();
    let x = x.build().unwrap();
    let short: ModelSpec = serde_json::from_str(r#"{"schrodinger": {"lambda": 1.5}}"#).unwrap();
    let long: ModelSpec = serde_json::from_str(
        r#"{"N": 1, "beta": 1.0, "terms": [
            {"h": [0], "coef": {"kind": "lookup", "key_radius": 0, "hoelder": 1.5,
              "table": [{"pattern": ["a"], "value": 0.0}, {"pattern": ["b"], "value": 1.5}]}},
            {"h": [1], "coef": {"kind": "constant", "value": 1.0}},
            {"h": [-1], "coef": {"kind": "constant", "value": [1.0, 0.0]}}]}"#,
    )
    .unwrap();
    let (a, b) = (short.build(x.alphabet()).unwrap(), long.build(x.alphabet()).unwrap());
    assert_eq!(a.schur_norm().unwrap(), b.schur_norm().unwrap());
    for theta in [0.0, 0.7, 2.0] {
        let ma = assemble_bloch(&a, &x, theta).unwrap().matrix;
        let mb = assemble_bloch(&b, &x, theta).unwrap().matrix;
        assert!(ma.sub(&mb).unwrap().max_abs() < 1e-15);
    }
}

#[test]
fn configuration_formats() {
    let parse = |s: &str| serde_json::from_str::<ConfigurationSpec>(s).unwrap().build();
    let p = parse(r#"{"alphabet": {"labels": ["x", "y", "z"]}, "configuration": {"kind": "periodic", "block": ["x", "z"]}, "shift": [1]}"#).unwrap();
    assert_eq!([p.letter_at(&[0]), p.letter_at(&[1])], [2, 0]);
    let q = parse(r#"{"configuration": {"kind": "kohmoto", "alpha": {"p": 2, "q": 5}}}"#).unwrap();
    assert_eq!(q.periods(), Some(vec![5]));
    let q = parse(r#"{"configuration": {"kind": "kohmoto", "alpha": 0.4}}"#).unwrap();
    assert_eq!(q.periods(), Some(vec![5]));
    let two = parse(r#"{"lattice": {"d": 2}, "configuration": {"kind": "periodic", "periods": [2, 2], "block": ["a", "b", "b", "a"]}}"#).unwrap();
    assert_eq!(two.dim(), 2);
    let rot = parse(
        r#"{"configuration": {"kind": "rotation", "alpha": "golden", "cuts": [{"int": 1, "alpha": -1}], "letters": ["a", "b"]}}"#,
    )
    .unwrap();
    assert_eq!(rot.periods(), None);
    assert!(parse(r#"{"configuration": {"kind": "periodic", "block": ["q"]}}"#).is_err());
    assert!(parse(r#"{"alphabet": {"labels": ["a", "b", "c"], "metric": [[0, 0.25, 1], [0.25, 0, 0.25], [1, 0.25, 0]]}, "configuration": {"kind": "periodic", "block": ["a"]}}"#)
        .unwrap_err()
        .to_string()
        .contains("triangle inequality"));
    assert!(serde_json::from_str::<ConfigurationSpec>(r#"{"configuration": {"kind": "spiral"}}"#).is_err());
}
