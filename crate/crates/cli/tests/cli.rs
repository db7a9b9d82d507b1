use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stbc-forge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn family_writes_all_members() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let o = forge(&["family", "--a", "2", "--out", p(&f)]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let v = read_json(&f);
    assert_eq!(v["matrices"].as_array().unwrap().len(), 5);
    assert_eq!(v["c"], serde_json::json!([0, 1]));
    assert_eq!(forge(&["family", "--a", "0", "--out", p(&f)]).status.code(), Some(2));
}

#[test]
fn constructed_codes_verify_as_declared() {
    let dir = tempfile::tempdir().unwrap();
    let mut cases = vec![];
    for n in ["2", "4", "8"] {
        cases.push((n, "ussd", "unitary-weight-SSD"));
        cases.push((n, "cod", "COD"));
    }
    cases.push(("4", "ciod4", "non-unitary-weight-SSD"));
    for (n, family, class) in cases {
        let code = dir.path().join(format!("{family}{n}.json"));
        let report = dir.path().join(format!("{family}{n}-report.json"));
        let o = forge(&["construct", "--antennas", n, "--family", family, "--out", p(&code)]);
        assert_eq!(o.status.code(), Some(0), "{o:?}");
        assert_eq!(read_json(&code)["class"], class);
        let o = forge(&["verify", p(&code), "--report", p(&report)]);
        assert_eq!(o.status.code(), Some(0), "{family}{n}: {}", stdout(&o));
        let r = read_json(&report);
        assert_eq!(r["class"], class);
        assert_eq!(r["ok"], true);
    }
}

#[test]
fn construct_rejects_bad_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    for args in [["--antennas", "6", "--family", "ussd"], ["--antennas", "8", "--family", "ciod4"]] {
        let mut full = vec!["construct"];
        full.extend(args);
        full.extend(["--out", p(&out)]);
        assert_eq!(forge(&full).status.code(), Some(2));
    }
    assert!(!out.exists());
}

#[test]
fn broken_code_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("u.json");
    forge(&["construct", "--antennas", "4", "--family", "ussd", "--out", p(&good)]);
    let mut v = read_json(&good);
    // A_2I := A_3I, so slots 2 and 3 violate the II condition
    let w = v["weights"].as_array_mut().unwrap();
    w[2] = w[4].clone();
    v.as_object_mut().unwrap().remove("class");
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let report = dir.path().join("r.json");
    let o = forge(&["verify", p(&bad), "--report", p(&report)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("SSD-II (2,3)"), "{}", stdout(&o));
    let r = read_json(&report);
    assert_eq!(r["class"], "not-SSD");
    let failed = r["failed_conditions"].as_array().unwrap();
    assert!(failed.iter().any(|f| f["condition"] == "SSD-II" && f["i"] == 2 && f["j"] == 3));
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("junk.json");
    std::fs::write(&f, "{\"n\": 4}").unwrap();
    assert_eq!(forge(&["verify", p(&f)]).status.code(), Some(2));
    assert_eq!(forge(&["verify", "/nonexistent/code.json"]).status.code(), Some(2));
    assert_eq!(forge(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(forge(&["family", "--a", "2"]).status.code(), Some(2));
}

#[test]
fn coding_gain_prints_table_value() {
    let dir = tempfile::tempdir().unwrap();
    for (family, m) in [("ussd", "qam4"), ("ussd", "qam16"), ("ciod4", "qam64")] {
        let code = dir.path().join(format!("{family}.json"));
        forge(&["construct", "--antennas", "4", "--family", family, "--out", p(&code)]);
        let o = forge(&["coding-gain", "--code", p(&code), "--constellation", m, "--angle", "auto", "--energy", "raw"]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).starts_with("min_det 10.240000"), "{family} {m}: {}", stdout(&o));
    }
    let code = dir.path().join("ussd.json");
    let o = forge(&["coding-gain", "--code", p(&code), "--constellation", "qam4", "--angle", "0"]);
    assert!(stdout(&o).starts_with("min_det 0.000000"), "{}", stdout(&o));
    assert!(stdout(&o).contains("not full diversity"));
    let o = forge(&["coding-gain", "--code", p(&code), "--constellation", "qam4", "--brute-force", "--code-scaling", "none"]);
    assert!(stdout(&o).starts_with("min_det 163.840000"), "{}", stdout(&o));
    assert!(stdout(&o).contains("search full"));
    let o = forge(&["coding-gain", "--code", p(&code), "--constellation", "qam4", "--brute-force", "--single-symbol"]);
    assert_eq!(o.status.code(), Some(2));
    let o = forge(&["coding-gain", "--code", p(&code), "--constellation", "qam4", "--angle", "sideways"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_writes_csv_and_sidecar_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let code = dir.path().join("u.json");
    forge(&["construct", "--antennas", "4", "--family", "ussd", "--out", p(&code)]);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = forge(&[
            "simulate", "--code", p(&code), "--constellation", "qam4", "--angle", "auto", "--snr", "0:5:10", "--rx", "1",
            "--trials", "3000", "--seed", "42", "--out", p(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{o:?}");
        out
    };
    let a = run("a.csv");
    let b = run("b.csv");
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("snr_db,trials,errors,cer,ci95"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![0.0, 5.0, 10.0]);
    assert!(rows.windows(2).all(|w| w[1][3] <= w[0][3]));
    let side = read_json(&a.with_extension("json"));
    assert_eq!(side["seed"], 42);
    assert_eq!(side["trials"], 3000);
    assert_eq!(side["decoder"], "ssd");
    assert!(side["snr_definition"].as_str().unwrap().contains("N0"));

    let out = dir.path().join("c.csv");
    let o = forge(&["simulate", "--code", p(&code), "--constellation", "qam4", "--snr", "5:1:0", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    let o = forge(&["simulate", "--code", p(&code), "--constellation", "qam4", "--trials", "0", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_mentions_every_subcommand() {
    let o = forge(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for sub in ["family", "construct", "verify", "coding-gain", "simulate"] {
        assert!(stdout(&o).contains(sub));
    }
}
