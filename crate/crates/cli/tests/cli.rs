use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kernel_roots_cli::report::recanonicalize;
use serde_json::Value;

const KOSTLAN1: &str = r#"{"n":1,"terms":[{"e":[1],"c2":1},{"e":[0],"c2":1}]}"#;
const KOSTLAN2: &str =
    r#"{"n":2,"terms":[{"e":[0,0],"c2":1},{"e":[1,0],"c2":1},{"e":[0,1],"c2":1}]}"#;
const KOSTLAN3: &str = r#"{"n":3,"terms":[{"e":[0,0,0],"c2":1},{"e":[1,0,0],"c2":1},{"e":[0,1,0],"c2":1},{"e":[0,0,1],"c2":1}]}"#;

/// Scratch directory holding the standard input files.
fn workdir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    for (file, text) in [
        ("k1.json", KOSTLAN1),
        ("k2.json", KOSTLAN2),
        ("k3.json", KOSTLAN3),
        ("simplex.json", r#"{"n":2,"vertices":[[0,0],[1,0],[0,1]]}"#),
        ("simplex2.json", r#"{"n":2,"vertices":[[0,0],[2,0],[0,2]]}"#),
        ("simplex3.json", r#"{"n":2,"vertices":[[0,0],[3,0],[0,3]]}"#),
        ("seg_x.json", r#"{"n":2,"vertices":[[0,0],[2,0]]}"#),
        ("seg_y.json", r#"{"n":2,"vertices":[[0,0],[0,3]]}"#),
        ("bad.json", r#"{"n":1,"terms":[{"e":[1]"#),
    ] {
        fs::write(dir.join(file), text).unwrap();
    }
    dir
}

fn run_in(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kernel-roots"));
    cmd.current_dir(dir)
        .args(args)
        .env_remove("KERNEL_ROOTS_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn run(dir: &Path, args: &[&str]) -> Output {
    run_in(dir, args, &[])
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn result<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|x| x["name"] == name)
        .unwrap_or_else(|| panic!("no result {name} in {r}"))
}

fn value(r: &Value, name: &str) -> f64 {
    result(r, name)["value"].as_f64().unwrap()
}

fn without_wall_time(text: &str) -> Value {
    let mut v: Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_s");
    v
}

#[test]
fn space_power_gives_binomials() {
    let dir = workdir("power");
    let out = run(&dir, &["space", "power", "--d", "3", "k1.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "{\"n\":1,\"terms\":[{\"e\":[0],\"c2\":1.0},{\"e\":[1],\"c2\":3.0},{\"e\":[2],\"c2\":3.0},{\"e\":[3],\"c2\":1.0}]}\n"
    );
}

#[test]
fn space_product_and_hull() {
    let dir = workdir("product");
    let prod = run(&dir, &["space", "product", "k1.json", "k1.json"]);
    let pow = run(&dir, &["space", "power", "--d", "2", "k1.json"]);
    assert_eq!(prod.status.code(), Some(0));
    assert_eq!(stdout(&prod), stdout(&pow));
    let hull = run(&dir, &["space", "hull", "k2.json"]);
    assert_eq!(
        stdout(&hull),
        "{\"n\":2,\"vertices\":[[0,0],[0,1],[1,0]]}\n"
    );
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = workdir("malformed");
    for args in [
        vec!["space", "hull", "bad.json"],
        vec!["space", "hull", "missing.json"],
        vec!["space", "product", "k1.json", "k2.json"],
        vec!["expect", "--domain", "1:0", "k1.json"],
        vec!["expect", "--domain", "0:1,0:1,0:1", "k2.json"],
        vec!["expect", "--degrees", "2,3,4", "k2.json"],
        vec!["expect", "k1.json", "k2.json"],
        vec!["expect", "--method", "both", "--samples", "1", "k1.json"],
        vec!["eval", "--at", "0,0", "k1.json"],
        vec!["verify", "nope"],
        vec!["bkk", "simplex.json", "k3.json", "k3.json"],
        vec!["frobnicate"],
    ] {
        let out = run(&dir, &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn unsupported_configurations_exit_with_three() {
    let dir = workdir("unsupported");
    for args in [
        vec!["expect", "--method", "mc", "k3.json"],
        vec!["expect", "--method", "both", "k3.json"],
    ] {
        assert_eq!(run(&dir, &args).status.code(), Some(3), "{args:?}");
    }
    let k4 = r#"{"n":4,"terms":[{"e":[0,0,0,0],"c2":1},{"e":[1,0,0,0],"c2":1},{"e":[0,1,0,0],"c2":1},{"e":[0,0,1,0],"c2":1},{"e":[0,0,0,1],"c2":1}]}"#;
    fs::write(dir.join("k4.json"), k4).unwrap();
    for args in [
        vec!["expect", "k4.json"],
        vec!["space", "hull", "k4.json"],
        vec!["bkk", "k4.json"],
    ] {
        assert_eq!(run(&dir, &args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn expect_reproduces_closed_forms() {
    let dir = workdir("expect");
    let half = report(&run(&dir, &["expect", "--domain", "-30:30", "k1.json"]));
    assert!((value(&half, "quad") - 0.5).abs() < 1e-3);
    let one = report(&run(
        &dir,
        &["expect", "--degrees", "4", "--domain", "-30:30", "k1.json"],
    ));
    assert!((value(&one, "quad") - 1.0).abs() < 1e-3);
    let kss = report(&run(
        &dir,
        &["expect", "--signed", "all", "--degrees", "4", "k1.json"],
    ));
    assert!((value(&kss, "quad") - 2.0).abs() < 2e-3);
    let quarter = report(&run(&dir, &["expect", "--nodes", "32", "k2.json"]));
    assert!((value(&quarter, "quad") - 0.25).abs() < 1e-3);
    assert!(result(&quarter, "quad")["error"].as_f64().unwrap() >= 0.0);
}

#[test]
fn both_methods_agree_and_report_z_score() {
    let dir = workdir("both");
    let out = run(
        &dir,
        &[
            "expect", "--method", "both", "--domain", "-30:30", "--seed", "3", "k1.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let quad = value(&r, "quad");
    let mc = result(&r, "mc");
    let (mean, se) = (mc["value"].as_f64().unwrap(), mc["error"].as_f64().unwrap());
    assert!((quad - 0.5).abs() < 1e-3);
    assert!((mean - quad).abs() <= 3.0 * se);
    assert!((value(&r, "z_score") - (quad - mean) / se).abs() < 1e-9);
    assert_eq!(mc["samples"], 10_000);
    assert_eq!(r["status"], "pass");
}

#[test]
fn disagreement_is_a_verification_failure() {
    let dir = workdir("disagree");
    // A one-point rule on [-30, 30] overestimates the count twentyfold.
    let out = run(
        &dir,
        &[
            "expect",
            "--method",
            "both",
            "--nodes",
            "1",
            "--subdiv",
            "1",
            "--samples",
            "2000",
            "k1.json",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["status"], "fail");
}

#[test]
fn reports_round_trip_byte_identically() {
    let dir = workdir("roundtrip");
    for args in [
        vec!["expect", "--method", "both", "--samples", "500", "k1.json"],
        vec!["eval", "--at", "0.25,-1.5", "k2.json"],
        vec!["verify", "identities"],
        vec!["bkk", "seg_x.json", "seg_y.json"],
    ] {
        let text = stdout(&run(&dir, &args));
        assert_eq!(recanonicalize(&text).unwrap(), text, "{args:?}");
    }
}

#[test]
fn reports_are_deterministic_across_worker_counts() {
    let dir = workdir("determinism");
    let args = [
        "expect",
        "--method",
        "both",
        "--samples",
        "400",
        "--domain",
        "-4:4",
        "--seed",
        "9",
        "k2.json",
    ];
    let a = stdout(&run_in(&dir, &args, &[("KERNEL_ROOTS_THREADS", "1")]));
    let b = stdout(&run_in(&dir, &args, &[("KERNEL_ROOTS_THREADS", "3")]));
    let c = stdout(&run(&dir, &args));
    assert_eq!(without_wall_time(&a), without_wall_time(&b));
    assert_eq!(without_wall_time(&a), without_wall_time(&c));
    let bad = run_in(
        &dir,
        &["verify", "identities"],
        &[("KERNEL_ROOTS_THREADS", "0")],
    );
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn profile_csv_covers_the_grid() {
    let dir = workdir("profile");
    let out = run(
        &dir,
        &[
            "expect",
            "--domain",
            "-1:1",
            "--profile",
            "5",
            "--profile-out",
            "p.csv",
            "k2.json",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.join("p.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x1,x2,density");
    assert_eq!(lines.len(), 1 + 25);
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(&first[..2], &[-1.0, -1.0]);
    assert!(first[2] > 0.0);
    assert_eq!(report(&out)["profile_path"], "p.csv");
}

#[test]
fn eval_density_at_origin() {
    let dir = workdir("eval");
    let r = report(&run(&dir, &["eval", "--at", "0", "k1.json"]));
    assert!((value(&r, "density") - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
    assert!((value(&r, "space1.potential") - 0.5 * 2f64.ln()).abs() < 1e-15);
    assert_eq!(
        result(&r, "space1.metric")["value"][0][0].as_f64().unwrap(),
        0.25
    );
}

#[test]
fn bkk_counts() {
    let dir = workdir("bkk");
    let count = |args: &[&str]| {
        report(&run(&dir, args))["results"][0]["value"]
            .as_i64()
            .unwrap()
    };
    assert_eq!(count(&["bkk", "simplex.json", "simplex.json"]), 1);
    assert_eq!(count(&["bkk", "simplex2.json", "simplex3.json"]), 6);
    assert_eq!(count(&["bkk", "seg_x.json", "seg_y.json"]), 6);
    assert_eq!(count(&["bkk", "k2.json"]), 1);
}

#[test]
fn verify_suites_pass() {
    let dir = workdir("verify");
    let out = run(&dir, &["verify", "identities"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["checks"].as_array().unwrap().len(), 12);
    for c in r["checks"].as_array().unwrap() {
        assert!(c["value"].as_f64().unwrap() < 1e-12);
    }
    let scaling = run(&dir, &["verify", "scaling", "--seed", "7"]);
    assert_eq!(scaling.status.code(), Some(0), "{}", stdout(&scaling));
    assert_eq!(report(&scaling)["checks"].as_array().unwrap().len(), 20);
    let vitale = run(&dir, &["verify", "vitale", "--seed", "7"]);
    assert_eq!(vitale.status.code(), Some(0), "{}", stdout(&vitale));
}
