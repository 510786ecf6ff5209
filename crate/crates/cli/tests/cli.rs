use std::process::{Command, Output};

use serde_json::Value;

fn numvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_numvol")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}

#[test]
fn report_on_quadric() {
    let r = json(&numvol(&["report", "--variety", "P1xP1", "--curve", "1,1"]));
    let c = &r["curve"];
    assert!(close(c["vol_hat"]["value"].as_f64().unwrap(), 2.0, 1e-6));
    assert_eq!(c["vol_hat"]["method"], "optimizer");
    assert!(close(c["mobbound"]["value"].as_f64().unwrap(), 2048.0, 1e-6));
    assert_eq!(c["mobbound"]["constant"], "1024");
    assert!(close(c["minv"]["value"].as_f64().unwrap(), 2.0, 1e-6));
    assert_eq!(c["membership"]["movable_interior"], true);
    assert_eq!(r["manifest"]["variety"]["name"], "P1xP1");
    assert_eq!(r["manifest"]["seed"], 0);
}

#[test]
fn report_exact_cutkosky_volume() {
    let r = json(&numvol(&["report", "--variety", "Cutkosky", "--param", "d=2", "--class", "1,1"]));
    // (pi*H + (pi*H + L))^3 evaluated on the d = 2 tensor
    assert_eq!(r["class"]["vol"]["value"], "9");
    assert_eq!(r["class"]["vol"]["method"], "tensor");
    let csv = numvol(&["report", "--variety", "Cutkosky(2)", "--class", "1,1", "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap(), "quantity,value,method\nvol,9,tensor\n");
}

#[test]
fn malformed_coordinates_name_the_column() {
    let out = numvol(&["volume", "--variety", "P2", "--class", "1,x"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("column 3"), "{err}");
    let out = numvol(&["volume", "--variety", "F1", "--class", "1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected 2 coordinates"));
}

#[test]
fn unknown_variety_lists_catalog() {
    let out = numvol(&["volume", "--variety", "Enriques", "--class", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Cutkosky"));
}

#[test]
fn zariski_suite_skips_threefolds() {
    let out = numvol(&["verify", "--suite", "zariski", "--variety", "P3"]);
    let r = json(&out);
    assert_eq!(r["passed"], true);
    for c in r["criteria"].as_array().unwrap() {
        assert_eq!(c["skipped"], true);
        assert!(!c["warnings"].as_array().unwrap().is_empty());
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("SKIP"));
}

#[test]
fn example_suite_passes() {
    let r = json(&numvol(&["verify", "--suite", "example31"]));
    assert_eq!(r["passed"], true);
    let ids: Vec<u64> = r["criteria"].as_array().unwrap().iter().map(|c| c["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, [1, 2, 4]);
}

#[test]
fn duality_suite_on_f1() {
    let r = json(&numvol(&["verify", "--suite", "duality", "--variety", "F1"]));
    assert_eq!(r["passed"], true);
    let checks = r["criteria"][0]["checks"].as_array().unwrap();
    let gaps: Vec<f64> = checks
        .iter()
        .filter(|c| c["name"].as_str().unwrap().contains("relative gap"))
        .map(|c| c["measured"].as_f64().unwrap())
        .collect();
    assert_eq!(gaps.len(), 2);
    assert!(gaps.iter().all(|g| *g <= 1e-3));
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["cyclevol", "--variety", "BlkP2(2)", "--curve", "3,1,1", "--seed", "7"];
    let strip = |mut v: Value| {
        v["manifest"]["wall_clock_seconds"] = Value::Null;
        v
    };
    assert_eq!(strip(json(&numvol(&args))), strip(json(&numvol(&args))));
}

#[test]
fn zariski_decomposition_on_f1() {
    let r = json(&numvol(&["zariski", "--variety", "F1", "--class", "1,2"]));
    for (k, v) in r["checks"].as_object().unwrap() {
        assert_eq!(v, true, "{k}");
    }
    assert_eq!(r["method"], "surface-zariski");
    let out = numvol(&["zariski", "--variety", "P3", "--class", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_csv_and_fit() {
    let out = numvol(&["sweep", "--variety", "F1", "--gamma", "1,1", "--ample", "2,-1", "--eps", "1e-3:1e-1:logsteps=4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps,value,status");
    assert_eq!(lines.len(), 5);
    let r = json(&numvol(&["sweep", "--variety", "F1", "--gamma", "1,1", "--ample", "2,-1", "--eps", "1e-3:1e-1:logsteps=4", "--fit"]));
    assert!(r["sweep"]["slope"].as_f64().is_some());
    let bad = numvol(&["sweep", "--variety", "F1", "--gamma", "1,1", "--ample", "2,-1", "--eps", "1e-3:1e-1"]);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("logsteps"));
}

#[test]
fn fan_and_file_inputs_are_hashed() {
    let dir = tempfile::tempdir().unwrap();
    let fan = dir.path().join("f1.fan");
    std::fs::write(&fan, "[fan]\ndim = 2\nrays = [[1,0],[0,1],[-1,1],[0,-1]]\nmax_cones = [[0,1],[1,2],[2,3],[3,0]]\n").unwrap();
    let r = json(&numvol(&["volume", "--fan", fan.to_str().unwrap(), "--class", "1,1"]));
    assert_eq!(r["manifest"]["variety"]["kind"], "fan");
    assert_eq!(r["manifest"]["variety"]["sha256"].as_str().unwrap().len(), 64);
    assert!(r["method"].is_string());

    let file = dir.path().join("p2.var");
    std::fs::write(&file, numvol::varieties::write_variety(&numvol::varieties::catalog("P2", None).unwrap())).unwrap();
    let r = json(&numvol(&["volume", "--file", file.to_str().unwrap(), "--class", "2"]));
    assert_eq!(r["value"], "4");
    assert_eq!(r["method"], "tensor");
    let r = json(&numvol(&["volume", "--variety", file.to_str().unwrap(), "--class", "2"]));
    assert_eq!(r["manifest"]["variety"]["kind"], "file");
}

#[test]
fn catalog_lists_standard_entries() {
    let r = json(&numvol(&["catalog"]));
    let names: Vec<&str> = r["varieties"].as_array().unwrap().iter().map(|v| v["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"P1xP1") && names.contains(&"Cutkosky(1)"));
}
