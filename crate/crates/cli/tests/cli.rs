use assert_cmd::Command;
use serde_json::Value;

fn cylpack() -> Command {
    let mut c = Command::cargo_bin("cylpack").unwrap();
    c.env_remove("CYLPACK_SEED");
    c
}

fn stdout_json(args: &[&str]) -> Value {
    let out = cylpack().args(args).assert().success().get_output().stdout.clone();
    serde_json::from_slice(&out).unwrap()
}

#[test]
fn bound_reproduces_table_value() {
    let v = stdout_json(&["bound", "--t", "600", "--shape", "uncapped"]);
    let b = v["bound"].as_f64().unwrap();
    assert!((b - 0.921942).abs() < 5e-7, "{b}");
    assert_eq!(format!("{b:.4}"), "0.9219");
    assert_eq!(v["trivial"], false);
    for key in ["t", "shape", "rule_of_thumb", "conjectured"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn bound_below_threshold_is_trivial() {
    let v = stdout_json(&["bound", "--t", "96.65", "--shape", "capped"]);
    assert_eq!(v["trivial"], true);
    assert_eq!(v["bound"].as_f64(), Some(1.0));
}

#[test]
fn bad_flags_exit_2() {
    cylpack().args(["bound", "--t", "-1"]).assert().code(2);
    cylpack().args(["bound", "--t", "abc"]).assert().code(2);
    cylpack().args(["bound", "--t", "10", "--shape", "round"]).assert().code(2);
    cylpack().args(["bound", "--t", "10", "--shape", "mixed"]).assert().code(2);
    cylpack().arg("frobnicate").assert().code(2);
}

#[test]
fn table_csv() {
    let out = cylpack().arg("table").assert().success().get_output().stdout.clone();
    let mut r = csv::Reader::from_reader(out.as_slice());
    let headers = r.headers().unwrap().clone();
    assert_eq!(&headers[0], "item");
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let capellini = rows.iter().find(|x| &x[0] == "Capellini").unwrap();
    assert_eq!(&capellini[col("bound")], "0.9219");
    let broom = rows.iter().find(|x| &x[0] == "Broomstick").unwrap();
    assert_eq!(&broom[col("flagged")], "true");
    // the apostrophe in a label survives RFC 4180 parsing
    assert!(rows.iter().any(|x| &x[0] == "20' PVC Pipe"));
}

#[test]
fn table_extended_and_json() {
    let out = cylpack().args(["table", "--extended"]).assert().success().get_output().stdout.clone();
    let text = String::from_utf8(out).unwrap();
    assert!(text.lines().next().unwrap().ends_with("rule_of_thumb,conjectured"));
    let v = stdout_json(&["table", "--format", "json", "--extended"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["rule_of_thumb"].is_number() && r["conjectured"].is_number()));
    let plain = stdout_json(&["table", "--format", "json"]);
    assert!(plain[0].get("rule_of_thumb").is_none());
}

#[test]
fn pack_hex_writes_valid_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hex.json");
    let v = stdout_json(&["pack", "hex", "--t", "20", "--R", "40", "--out", path.to_str().unwrap()]);
    assert_eq!(v["valid"], true);
    assert!(v["density"].as_f64().unwrap() > v["density_inner"].as_f64().unwrap());
    let p = cylpack::read_packing(std::fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(p.len() as u64, v["n"].as_u64().unwrap());
    assert!(cylpack::is_valid_packing(&p).valid);
}

#[test]
fn pack_laminate_is_deterministic() {
    let run = || {
        cylpack()
            .args(["pack", "laminate", "--eps", "0.01", "--seed", "7"])
            .assert()
            .success()
            .get_output()
            .stdout
            .clone()
    };
    let a = run();
    assert_eq!(a, run());
    let other = cylpack()
        .args(["pack", "laminate", "--eps", "0.01", "--seed", "8"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    assert_ne!(a, other);
    // the seed may come from the environment
    let env = cylpack()
        .env("CYLPACK_SEED", "7")
        .args(["pack", "laminate", "--eps", "0.01"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    assert_eq!(a, env);
}

#[test]
fn pack_too_small_exits_3() {
    cylpack().args(["pack", "hex", "--t", "100", "--R", "10"]).assert().code(3);
}

fn hex_file(dir: &tempfile::TempDir) -> (std::path::PathBuf, usize) {
    let path = dir.path().join("hex.json");
    cylpack()
        .args(["pack", "hex", "--t", "10", "--R", "20", "--out", path.to_str().unwrap()])
        .assert()
        .success();
    let p = cylpack::read_packing(std::fs::File::open(&path).unwrap()).unwrap();
    let center = (0..p.len())
        .min_by(|&a, &b| {
            p.cylinders[a]
                .axis
                .midpoint()
                .norm()
                .total_cmp(&p.cylinders[b].axis.midpoint().norm())
        })
        .unwrap();
    (path, center)
}

#[test]
fn slice_of_hex_interior_is_sqrt12() {
    let dir = tempfile::tempdir().unwrap();
    let (path, i) = hex_file(&dir);
    let svg = dir.path().join("s.svg");
    let js = dir.path().join("s.json");
    let i = i.to_string();
    let args = [
        "slice",
        path.to_str().unwrap(),
        "-i",
        &i,
        "--svg",
        svg.to_str().unwrap(),
        "--json",
        js.to_str().unwrap(),
        "--reproducible",
    ];
    let v = stdout_json(&args);
    assert!((v["area"].as_f64().unwrap() - 12f64.sqrt()).abs() < 1e-5);
    assert_eq!(v["qualified"], false);
    assert_eq!(v["has_end_near"], false);
    assert!(v["steps"]["area_rearranged"].is_number());
    let first = std::fs::read(&svg).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    assert!(text.starts_with("<svg") && text.contains("<polygon"));
    assert!(!text.contains("<metadata>"));
    let export: Value = serde_json::from_slice(&std::fs::read(&js).unwrap()).unwrap();
    assert_eq!(export["events"].as_array().unwrap().len(), 6);
    // byte-identical on a second run
    stdout_json(&args);
    assert_eq!(first, std::fs::read(&svg).unwrap());
}

#[test]
fn slice_metadata_without_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (path, i) = hex_file(&dir);
    let svg = dir.path().join("m.svg");
    cylpack()
        .args(["slice", path.to_str().unwrap(), "-i", &i.to_string(), "--svg", svg.to_str().unwrap()])
        .assert()
        .success();
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<metadata>"));
}

#[test]
fn slice_of_isolated_cylinder_is_container_disc() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.json");
    std::fs::write(
        &path,
        r#"{"version": 1, "capped": true, "t": 4.0, "R": 5.0,
            "cylinders": [{"p0": [0, 0, -2], "p1": [0, 0, 2]}]}"#,
    )
    .unwrap();
    let v = stdout_json(&["slice", path.to_str().unwrap(), "-i", "0", "-s", "0.75"]);
    // x = (0, 0, 1): in-plane container radius √24
    let want = std::f64::consts::PI * 24.0;
    assert!((v["area"].as_f64().unwrap() - want).abs() < 1e-6);
}

#[test]
fn slice_at_end_sees_the_end() {
    let dir = tempfile::tempdir().unwrap();
    let (path, i) = hex_file(&dir);
    let v = stdout_json(&["slice", path.to_str().unwrap(), "-i", &i.to_string(), "-s", "0"]);
    assert_eq!(v["has_end_near"], true);
    assert!(v["steps"].is_null());
}

#[test]
fn slice_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    cylpack().args(["slice", bad.to_str().unwrap(), "-i", "0"]).assert().code(4);
    cylpack().args(["slice", "/nonexistent/file.json", "-i", "0"]).assert().code(4);
    let (path, _) = hex_file(&dir);
    cylpack().args(["slice", path.to_str().unwrap(), "-i", "99999"]).assert().code(2);
    cylpack().args(["slice", path.to_str().unwrap(), "-i", "0", "-s", "1.5"]).assert().code(2);
    cylpack().args(["slice", path.to_str().unwrap(), "-i", "0", "--tol", "0"]).assert().code(2);
}

#[test]
fn verify_three_ball_passes() {
    let out = cylpack().args(["verify", "three-ball"]).assert().success().get_output().stdout.clone();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("suite three-ball: PASS"));
    assert!(text.contains("margin"));
}

#[test]
fn verify_extremal_json() {
    let v = stdout_json(&["verify", "extremal", "--format", "json"]);
    let r = &v[0];
    assert_eq!(r["suite"], "extremal");
    assert_eq!(r["passed"], true);
    let min = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "min total area is √12").unwrap();
    assert!((min["value"].as_f64().unwrap() - 12f64.sqrt()).abs() < 1e-6);
}

#[test]
fn verify_is_independent_of_jobs() {
    let run = |jobs: &str| {
        cylpack()
            .args([
                "verify",
                "qualified",
                "--seed",
                "42",
                "--packings",
                "6",
                "--points",
                "3",
                "--format",
                "json",
                "--jobs",
                jobs,
            ])
            .assert()
            .success()
            .get_output()
            .stdout
            .clone()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# laminate seed\nseed = 7\n").unwrap();
    let from_file = cylpack()
        .args(["--config", cfg.to_str().unwrap(), "pack", "laminate", "--eps", "0.01"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    let direct = cylpack()
        .args(["pack", "laminate", "--eps", "0.01", "--seed", "7"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    assert_eq!(from_file, direct);
    let overridden = cylpack()
        .args(["--config", cfg.to_str().unwrap(), "pack", "laminate", "--eps", "0.01", "--seed", "8"])
        .assert()
        .success()
        .get_output()
        .stdout
        .clone();
    assert_ne!(from_file, overridden);

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    cylpack().args(["--config", cfg.to_str().unwrap(), "table"]).assert().code(2);
}
