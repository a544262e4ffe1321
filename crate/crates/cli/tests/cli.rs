use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn zerostab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zerostab"))
        .args(args)
        .env_remove("ZEROSTAB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (headers, rows)
}

#[test]
fn exit_codes() {
    assert_eq!(zerostab(&["analyze", "--lambda=-1.8"]).status.code(), Some(0));
    assert_eq!(zerostab(&["analyze", "--alphas", "2", "--beta", "1"]).status.code(), Some(0));
    assert_eq!(zerostab(&["analyze", "--alphas", "2", "--beta", "1", "--strict"]).status.code(), Some(2));
    assert_eq!(zerostab(&["analyze", "--lambda=-1.8", "--strict"]).status.code(), Some(0));
    assert_eq!(zerostab(&["analyze", "--alphas", "1,x", "--beta", "1"]).status.code(), Some(64));
    assert_eq!(zerostab(&["analyze", "--lambda", "0"]).status.code(), Some(64));
    assert_eq!(zerostab(&["lambda-scan", "--lambda-min", "1", "--lambda-max", "0"]).status.code(), Some(64));
    assert_eq!(zerostab(&["propagate", "--table8", "--depth", "0"]).status.code(), Some(64));
    assert_eq!(zerostab(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(zerostab(&[]).status.code(), Some(64));
    assert_eq!(zerostab(&["--help"]).status.code(), Some(0));
}

#[test]
fn analyze_reports_the_optimal_member() {
    let o = zerostab(&["analyze", "--lambda=-9/5"]);
    let (headers, rows) = csv_rows(&stdout(&o));
    let get = |name: &str| &rows[0][headers.iter().position(|h| h == name).unwrap()];
    assert_eq!(get("alpha_0"), "0.3333333333");
    assert_eq!(get("beta"), "1.777777778");
    assert_eq!(get("zero_stable"), "true");
    assert_eq!(get("consistent"), "true");
    assert!(stderr(&o).contains("zero_stable=true"));
}

#[test]
fn violations_are_reported() {
    let o = zerostab(&["analyze", "--alphas", "2", "--beta", "1", "--strict"]);
    assert!(stderr(&o).contains("violation"), "{}", stderr(&o));
}

#[test]
fn corrupted_fixture_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    std::fs::write(
        &path,
        "alpha_0,alpha_1,alpha_2,beta,modulus_1,modulus_2,modulus_3,zero_stable\n\
         1,1,1,1,1.84,0.74,0.74,false\n\
         1/3,5/9,1/9,16/9,0.33,0.33,1.00,true\n\
         0.1,0.2,0.3,0.4,0.81,0.61,0.62,true\n",
    )
    .unwrap();
    let o = zerostab(&["table-verify", "--fixture", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("2/3 rows pass"), "{err}");
    assert!(err.contains("row 3:"), "{err}");
    assert!(!err.contains("row 1:") && !err.contains("row 2:"), "{err}");
}

#[test]
fn malformed_fixture_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "alpha_0,beta,modulus_1,zero_stable\nabc,1,1,true\n").unwrap();
    let o = zerostab(&["table-verify", "--fixture", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn output_files_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = zerostab(&[
            "propagate",
            "--table8",
            "--noise",
            "gaussian:0.02",
            "--depth",
            "20",
            "--width",
            "8",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["propagate", "--table8", "--lambda=-1.8,0.5", "--noise", "gaussian:0.01", "--noise", "none", "--depth", "16", "--width", "8"];
    let one = zerostab(&[&args[..], &["--threads", "1"]].concat());
    let four = zerostab(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let (headers, rows) = csv_rows(&stdout(&one));
    assert_eq!(rows.len(), 24);
    let stable = headers.iter().position(|h| h == "zero_stable").unwrap();
    // zero-stable schemes come first
    let first_unstable = rows.iter().position(|r| r[stable] == "false").unwrap();
    assert!(rows[first_unstable..].iter().all(|r| r[stable] == "false"));
}

#[test]
fn json_and_csv_carry_the_same_fields() {
    let csv = zerostab(&["lambda-scan", "--lambda-min=-2", "--lambda-max=-1.5", "--step", "0.1"]);
    let json = zerostab(&["lambda-scan", "--lambda-min=-2", "--lambda-max=-1.5", "--step", "0.1", "--format", "json"]);
    let (headers, rows) = csv_rows(&stdout(&csv));
    let records: Vec<Value> = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(records.len(), rows.len());
    for (rec, row) in records.iter().zip(&rows) {
        let obj = rec.as_object().unwrap();
        assert_eq!(obj.keys().collect::<Vec<_>>(), headers.iter().collect::<Vec<_>>());
        for (h, v) in headers.iter().zip(row) {
            match &obj[h] {
                Value::Number(n) => assert_eq!(n.as_f64().unwrap(), v.parse::<f64>().unwrap(), "column {h}"),
                Value::String(s) => assert_eq!(s, v, "column {h}"),
                other => assert_eq!(&other.to_string(), v, "column {h}"),
            }
        }
    }
}

#[test]
fn scan_finds_the_optimum() {
    let o = zerostab(&["lambda-scan"]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1999);
    assert!(stderr(&o).contains("-1.8"), "{}", stderr(&o));
}

#[test]
fn config_file_fills_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.toml");
    std::fs::write(&cfg, "lambda_min = -2.0\nlambda_max = -1.0\nstep = 0.5\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let (_, rows) = csv_rows(&stdout(&zerostab(&["lambda-scan", "--config", cfg])));
    // -1 is excluded
    assert_eq!(rows.len(), 2);
    let (_, rows) = csv_rows(&stdout(&zerostab(&["lambda-scan", "--config", cfg, "--step", "0.25"])));
    assert_eq!(rows.len(), 4);
}

#[test]
fn bad_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[nested]\nx = 1\n").unwrap();
    let o = zerostab(&["lambda-scan", "--config", cfg.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn out_dir_environment_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_zerostab"))
        .args(["table-verify", "--out", "nested/table.csv"])
        .env("ZEROSTAB_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let written = std::fs::read_to_string(dir.path().join(Path::new("nested/table.csv"))).unwrap();
    assert_eq!(written.lines().count(), 11);
}

#[test]
fn integrate_matches_between_preset_and_expression() {
    let preset = zerostab(&["integrate", "--lambda=-1.8", "--preset", "decay", "--h", "0.05"]);
    let expr = zerostab(&["integrate", "--lambda=-1.8", "--rhs", "-y", "--y0", "1", "--h", "0.05"]);
    assert_eq!(preset.status.code(), Some(0), "{}", stderr(&preset));
    assert_eq!(expr.status.code(), Some(0), "{}", stderr(&expr));
    let (ph, prow) = csv_rows(&stdout(&preset));
    let (eh, erow) = csv_rows(&stdout(&expr));
    assert_eq!(prow.len(), 21);
    assert_eq!(erow.len(), 21);
    let py = ph.iter().position(|h| h == "y_0").unwrap();
    let ey = eh.iter().position(|h| h == "y_0").unwrap();
    // the preset seeds from the exact solution, the expression from RK4
    for (p, e) in prow.iter().zip(&erow).skip(3) {
        let (a, b): (f64, f64) = (p[py].parse().unwrap(), e[ey].parse().unwrap());
        assert!((a - b).abs() < 1e-5, "{a} vs {b}");
    }
}

#[test]
fn probe_separates_stable_and_unstable_schemes() {
    let bad = zerostab(&["integrate", "--alphas", "2", "--beta", "1", "--preset", "decay", "--probe", "1e-3", "--steps", "20"]);
    assert!(stderr(&bad).contains("verdict=divergent"), "{}", stderr(&bad));
    let good = zerostab(&["integrate", "--lambda=-1.8", "--preset", "decay", "--probe", "1e-3", "--steps", "100"]);
    assert!(stderr(&good).contains("verdict=bounded"), "{}", stderr(&good));
}

#[test]
fn convergence_orders_are_reported() {
    let o = zerostab(&["integrate", "--lambda=-1.8", "--preset", "decay", "--orders", "0.02,0.01,0.005,0.0025"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stderr(&o).lines().find(|l| l.starts_with("order=")).map(String::from);
    let line = line.unwrap_or_else(|| panic!("{}", stderr(&o)));
    let order: f64 = line
        .split(|c: char| c == '=' || c.is_whitespace())
        .filter_map(|t| t.parse().ok())
        .next()
        .unwrap();
    assert!((1.7..2.3).contains(&order), "{line}");
}
