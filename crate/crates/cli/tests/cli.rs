use std::process::{Command, Output};

fn maslov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maslov"))
        .args(args)
        .output()
        .expect("spawn maslov")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stderr).expect("stderr is one JSON record")
}

#[test]
fn index_report_has_the_documented_keys() {
    let o = maslov(&["index", "--shape", "circle:r=1", "--no-timestamps"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    for key in ["shape", "loop", "N", "index_winding", "index_integral", "theorem_residual", "agreement", "status"] {
        assert!(v.get(key).is_some(), "missing {key} in {line}");
    }
    assert_eq!(v["status"], "verified");
    assert!(v.get("timestamp_ms").is_none());
    // keys appear in declaration order
    assert!(line.starts_with("{\"shape\":\"circle:r=1\",\"loop\":\"full\",\"N\":512,"));
}

#[test]
fn timestamps_are_on_by_default() {
    let o = maslov(&["index", "--shape", "circle:r=1", "--samples", "32"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(v["timestamp_ms"].as_u64().is_some());
}

#[test]
fn reversed_loop_negates_the_index() {
    let o = maslov(&["index", "--shape", "circle:r=2", "--loop", "rev:full", "--no-timestamps"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["index_winding"], -2);
    assert_eq!(v["loop"], "rev:full");
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("periods.csv");
    std::fs::write(
        &cfg,
        format!(
            "samples = 64\nformat = \"csv\"\nno_timestamps = true\nout = {:?}\n\n[shape]\nid = \"product-torus\"\nr1 = 1\nr2 = 0.5\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = maslov(&["periods", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv, "shape,loop,N,period\n\"product-torus:r1=1,r2=0.5\",gen:1,64,2\n\"product-torus:r1=1,r2=0.5\",gen:2,64,2\n");

    // flags win over the file
    let o = maslov(&["periods", "--config", cfg.to_str().unwrap(), "--samples", "8"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "shape = \"circle\"\nsampels = 64\n").unwrap();
    let o = maslov(&["index", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["reason"], "config-error");
}

#[test]
fn expression_shapes_use_the_looser_tier() {
    let o = maslov(&[
        "index",
        "--shape",
        "expr:coords=2*cos(u1)|2*sin(u1),period=2*pi",
        "--loop",
        "full",
        "--no-timestamps",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["index_winding"], 2);
    assert!(v["theorem_residual"].as_f64().unwrap() <= 1e-3);
}

#[test]
fn every_catalog_entry_passes_check() {
    let o = maslov(&["catalog", "--no-timestamps"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut seen = 0;
    for line in out.lines() {
        let entry: serde_json::Value = serde_json::from_str(line).unwrap();
        let example = entry["example"].as_str().unwrap();
        let c = maslov(&["check", "--shape", example, "--grid", "6", "--no-timestamps"]);
        assert_eq!(c.status.code(), Some(0), "{example}: {}", String::from_utf8_lossy(&c.stderr));
        let v: serde_json::Value = serde_json::from_str(stdout(&c).trim()).unwrap();
        assert!(v["lagrangian_residual"].as_f64().unwrap() <= v["tolerance"].as_f64().unwrap());
        seen += 1;
    }
    assert_eq!(seen, 7);
}

#[test]
fn non_lagrangian_expression_fails_validation() {
    // a graph over R^2 with non-symmetric Jacobian is not Lagrangian
    let o = maslov(&["check", "--shape", "expr:coords=u1|u2|u2|0,lower=-1,upper=1", "--no-timestamps"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["status"], "failed");
    assert!(v["lagrangian_residual"].as_f64().unwrap() > 0.5);
    assert!(v["special"].is_null());
}

#[test]
fn rank_deficiency_reports_its_location() {
    let o = maslov(&["index", "--shape", "expr:coords=cos(u1)^3|sin(u1)^3,period=2*pi", "--loop", "full"]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr_json(&o);
    assert_eq!(e["reason"], "rank-deficient");
    assert_eq!(e["exit_code"], 1);
}

#[test]
fn theorem_csv_holds_the_angle_track() {
    let o = maslov(&["theorem", "--shape", "circle:r=1", "--samples", "16", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("shape,loop,k,t,det2_re,det2_im,phase_rate,integrand"));
    assert_eq!(lines.count(), 16);
}

#[test]
fn transport_on_a_curved_metric() {
    let o = maslov(&["transport", "--shape", "circle:r=0.5", "--metric", "fubini-study", "--steps", "200", "--no-timestamps"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["drift_warning"], false);
    assert!(v["displacement"].as_f64().unwrap() > 0.1);
    let o = maslov(&["transport", "--shape", "circle", "--metric", "hyperbolic"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_specs_are_config_errors() {
    for args in [
        vec!["index", "--shape", "torus"],
        vec!["index", "--shape", "circle:r=-1"],
        vec!["index", "--shape", "circle", "--loop", "gen:0"],
        vec!["index", "--shape", "circle", "--tol", "0"],
        vec!["index", "--shape", "expr:coords=sin(u1|cos(u1),period=2*pi"],
        vec!["sweep", "--shape", "product-torus", "--metric-family", "bump:eps=x"],
        vec!["index"],
    ] {
        let o = maslov(&args);
        assert_eq!(o.status.code(), Some(3), "{args:?}");
        assert!(stderr_json(&o)["reason"].is_string());
    }
}
