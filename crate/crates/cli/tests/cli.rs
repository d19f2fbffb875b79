use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn browder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_browder")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn identity_trace_writes_full_grids() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        browder(&["trace", "--function", "identity", "--k-start", "1", "--k-max", "4", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("boxes.csv")).unwrap();
    assert_eq!(csv.lines().count() - 1, 4 + 16 + 64 + 256);
    assert!(dir.path().join("components.json").exists());
    assert!(dir.path().join("plot.svg").exists());
}

#[test]
fn example1_trace_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = browder(&["trace", "--function", "example1", "--k-max", "7", "--out", path(d.path())]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    for f in ["boxes.csv", "components.json", "plot.svg"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, format!("function = constant-0.5\nk_max = 3\nout = {}\n", path(dir.path()))).unwrap();
    let out = browder(&["trace", "--config", path(&cfg), "--k-max", "4"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("boxes.csv")).unwrap();
    assert!(csv.lines().last().unwrap().starts_with("4,"));
}

#[test]
fn malformed_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "function = identity\nk_maxx = 3\n").unwrap();
    let out = browder(&["trace", "--config", path(&cfg)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("k_maxx"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&browder(&["trace", "--k-max", "many"])), 1);
    assert_eq!(code(&browder(&["frobnicate"])), 1);
    assert_eq!(code(&browder(&["trace", "--function", "nope", "--out", "/nonexistent/x"])), 1);
    assert_eq!(code(&browder(&["--help"])), 0);
}

#[test]
fn spanning_claim_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let claim = dir.path().join("full.txt");
    let mut text = String::new();
    for t in 0..4 {
        for x in 0..4 {
            text.push_str(&format!("2 {t} {x}\n"));
        }
    }
    fs::write(&claim, text).unwrap();
    let out = browder(&["witness", "--claimed-set", path(&claim), "--out", path(dir.path())]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("spanning component 0"), "{}", stderr(&out));
}

#[test]
fn truncated_claim_is_refuted_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let trace_dir = dir.path().join("trace");
    let out = browder(&["trace", "--function", "example1", "--k-max", "5", "--out", path(&trace_dir)]);
    assert_eq!(code(&out), 0);
    // level-5 boxes minus the middle column, from boxes.csv
    let csv = fs::read_to_string(trace_dir.join("boxes.csv")).unwrap();
    let claim: String = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|f| f[0] == "5" && f[1] != "16")
        .map(|f| format!("5 {} {}\n", f[1], f[2]))
        .collect();
    let claim_path = dir.path().join("claim.txt");
    fs::write(&claim_path, claim).unwrap();
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = browder(&[
            "witness",
            "--function",
            "example1",
            "--claimed-set",
            path(&claim_path),
            "--samples",
            "20000",
            "--seed",
            "3",
            "--out",
            path(&out_dir),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert!(String::from_utf8_lossy(&out.stdout).starts_with("Refuted"));
        outputs.push(fs::read(out_dir.join("witness.json")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn tabulated_partial_domain_claim_is_clean() {
    let dir = tempfile::tempdir().unwrap();
    let notch = |x: f64| if x <= 0.25 { x } else { (0.25 - 4.0 * (x - 0.25)).max(0.0) };
    let values: Vec<String> =
        (0..5).flat_map(|_| (0..17).map(move |j| format!("[{}]", notch(j as f64 / 16.0)))).collect();
    let table = format!(
        r#"{{"name": "notch", "n": 1, "level": 4, "t_range": [0.0, 0.25], "lipschitz": 4.0, "values": [{}]}}"#,
        values.join(", ")
    );
    let table_path = dir.path().join("notch.json");
    fs::write(&table_path, table).unwrap();
    let claim = dir.path().join("claim.txt");
    fs::write(&claim, "# the corner box\n2 0 0\n").unwrap();
    let out = browder(&[
        "witness",
        "--table",
        path(&table_path),
        "--claimed-set",
        path(&claim),
        "--samples",
        "20000",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("Clean"));
    let json = fs::read_to_string(dir.path().join("witness.json")).unwrap();
    assert!(json.contains("\"a1\": []"));
    assert!(json.contains("\"verdict\": \"clean\""));
}

#[test]
fn inconsistent_table_fails_to_load() {
    let dir = tempfile::tempdir().unwrap();
    let values: Vec<String> = (0..3).flat_map(|_| ["[0.0]", "[1.0]", "[0.0]"]).map(String::from).collect();
    let table =
        format!(r#"{{"name": "jump", "n": 1, "level": 1, "lipschitz": 1.0, "values": [{}]}}"#, values.join(","));
    let table_path = dir.path().join("jump.json");
    fs::write(&table_path, table).unwrap();
    let out = browder(&["trace", "--table", path(&table_path), "--out", path(dir.path())]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("between nodes"), "{}", stderr(&out));
}

#[test]
fn lift_trace_covers_all_cells() {
    let dir = tempfile::tempdir().unwrap();
    let out = browder(&["lift-trace", "--k-max", "8", "--curve-order", "4", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let cells = fs::read_to_string(dir.path().join("cells.csv")).unwrap();
    assert_eq!(cells.lines().count(), 257);
    assert!(cells.lines().skip(1).all(|l| l.ends_with(",true")));
    let coarse = browder(&["lift-trace", "--k-max", "6", "--curve-order", "4", "--out", path(dir.path())]);
    assert_eq!(code(&coarse), 1);
}

#[test]
fn corpus_and_plot() {
    let out = browder(&["corpus"]);
    assert_eq!(code(&out), 0);
    let listing = String::from_utf8_lossy(&out.stdout);
    assert!(listing.contains("\"example1\"") && listing.contains("homotopy2"));
    let dir = tempfile::tempdir().unwrap();
    let out = browder(&["plot", "--function", "example2", "--k-max", "5", "--out", path(dir.path())]);
    assert_eq!(code(&out), 0);
    let svg = fs::read_to_string(dir.path().join("plot.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    let flat = browder(&["plot", "--function", "identity-2d", "--k-max", "3", "--out", path(dir.path())]);
    assert_eq!(code(&flat), 1);
}
