use std::process::{Command, Output};

fn rectmix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rectmix"))
        .args(args)
        .env_remove("RECTMIX_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn converge_markdown_has_table_layout() {
    let o = rectmix(&["converge", "--problem", "1", "--k", "2", "--levels", "3", "--format", "md"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].contains("rate") && lines[0].contains("div"));
    assert!(lines[2].starts_with("| 1 | 0.3156 | 0.0 | 2.0116 |"), "{}", lines[2]);
    assert!(lines[4].starts_with("| 3 | 0.0166 |"), "{}", lines[4]);
}

#[test]
fn traction_levels_start_at_two() {
    let o = rectmix(&["converge", "--problem", "2", "--k", "1", "--levels", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("2,2,"));
}

#[test]
fn unisolvence_reports_every_element() {
    let o = rectmix(&["unisolvence"]);
    assert!(o.status.success());
    let text = stdout(&o);
    // 2 families × (3 orders × 4 elements in 2D + 2 orders × 6 elements in 3D).
    assert_eq!(text.lines().count(), 1 + 2 * (12 + 12));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",pass")));
}

#[test]
fn kernel_flags_checkerboard_at_lowest_order() {
    let o = rectmix(&["kernel", "--k", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("dimension=3"));
    assert!(text.contains("checkerboard_in_kernel=true"));
}

#[test]
fn infsup_json_carries_provenance() {
    let o = rectmix(&["infsup", "--k", "1", "--n", "2,4", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tool"], "rectmix");
    assert_eq!(v["passed"], true);
    assert_eq!(v["config"]["command"]["command"], "infsup");
    assert!(v["tolerances"]["beta_floor"].as_f64().unwrap() > 0.816);
    assert_eq!(v["result"].as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["kernel", "--n", "3"],
        vec!["converge", "--problem", "1", "--k", "9", "--levels", "1"],
        vec!["converge", "--problem", "3"],
        vec!["infsup", "--bogus"],
    ] {
        let o = rectmix(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn output_directory_override_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_rectmix"))
            .args(["infsup", "--k", "2", "--n", "2", "--format", "json"])
            .env("RECTMIX_OUT_DIR", dir.path())
            .output()
            .unwrap()
    };
    assert!(run().status.success());
    let first = std::fs::read(dir.path().join("infsup.json")).unwrap();
    assert!(run().status.success());
    let second = std::fs::read(dir.path().join("infsup.json")).unwrap();
    assert_eq!(first, second);

    let o = Command::new(env!("CARGO_BIN_EXE_rectmix"))
        .args(["unisolvence", "--dim", "2", "--output", "sub/audit.csv"])
        .env("RECTMIX_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("sub/audit.csv").exists());
}

#[test]
fn solve_and_export_read_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.cfg");
    std::fs::write(&cfg, "# traction bubble\nn = 4\nk = 2\nproblem = 2\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = rectmix(&["solve", "--config", c]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..5], &["4", "2", "full", "traction", "2"]);
    let err_u: f64 = row[8].parse().unwrap();
    assert!((err_u - 0.0107).abs() < 1e-4);

    let o = rectmix(&["export-matrix", "--config", c, "--n", "2", "--block", "constraints"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split_whitespace().collect();
    assert_eq!(header[0], "%");
    assert_eq!(header[1], "3");

    let o = rectmix(&["export-matrix", "--n", "2", "--bc", "displacement", "--block", "constraints"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn export_basis_rows_are_parseable() {
    let o = rectmix(&["export-basis", "--element", "displacement", "--k", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut basis = std::collections::BTreeSet::new();
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let cols: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cols.len(), 5);
        basis.insert(cols[0].parse::<usize>().unwrap());
        cols[4].parse::<f64>().unwrap();
    }
    assert_eq!(basis.len(), 10);
    let o = rectmix(&["export-basis", "--element", "shear", "--dim", "3", "--plane", "yz"]);
    assert!(o.status.success());
}
