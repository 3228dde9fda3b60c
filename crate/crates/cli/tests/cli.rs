use std::process::{Command, Output};

fn morphosim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morphosim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn missing_scenario_exits_2() {
    let out = morphosim(&["run", "missing.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not found"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(morphosim(&[]).status.code(), Some(2));
    assert_eq!(morphosim(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        morphosim(&["run", "x.cfg", "--method", "magic"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(morphosim(&["bench", "nonexistent"]).status.code(), Some(2));
}

#[test]
fn parse_error_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "[mesh]\nnx = 4\nny = lots\n").unwrap();
    let out = morphosim(&["check", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn bench_stress_free_reference() {
    let out = morphosim(&["bench", "stress_free_reference"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("max nodal |u|"));
    assert!(text.contains("stress_free_reference: PASS"));
}

#[test]
fn check_reports_every_assumption() {
    let out = morphosim(&["check", "small_traction"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    for name in [
        "frame",
        "coercivity",
        "nutrient uniqueness",
        "initial growth",
    ] {
        assert!(text.contains(name), "missing {name} in\n{text}");
    }
}

#[test]
fn check_flags_nutrient_uniqueness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("n.cfg");
    std::fs::write(
        &cfg,
        "[mesh]\nnx = 4\nnutrient = neumann\n[nutrient]\nbeta0 = 0\n[boundary]\ng_n = 0\n",
    )
    .unwrap();
    let out = morphosim(&["check", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
    let out = morphosim(&[
        "run",
        cfg.to_str().unwrap(),
        "--output-dir",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = morphosim(&[
        "run",
        "nutrient_growth",
        "--t-end",
        "0.1",
        "--method",
        "newton",
        "--cold-start",
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(out_dir.join("run.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("t,min_det_G,max_stress,nutrient_min,equilibrium_iters,rho_hat")
    );
    assert_eq!(csv.lines().count(), 4);
    let vtk = std::fs::read_to_string(out_dir.join("state_00002.vtk")).unwrap();
    for array in ["displacement", "nutrient", "growth_det", "stress_frobenius"] {
        assert!(vtk.contains(array));
    }
    assert!(!out_dir.join("diagnostic_snapshot.vtk").exists());
}

#[test]
fn mesh_gen_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.mesh");
    let out = morphosim(&[
        "mesh",
        "gen",
        "3x2",
        "--tags",
        "left_clamped",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mesh = morphosim_mesh(&path);
    assert_eq!(mesh, (3 * 4 + 2 * 3, 4 * 6));
    let to_stdout = morphosim(&["mesh", "gen", "3x2", "--tags", "left_clamped"]);
    assert_eq!(to_stdout.stdout, std::fs::read(&path).unwrap());
    assert_eq!(morphosim(&["mesh", "gen", "3xq"]).status.code(), Some(2));
}

fn morphosim_mesh(path: &std::path::Path) -> (usize, usize) {
    let file = std::io::BufReader::new(std::fs::File::open(path).unwrap());
    let mesh = morphosim_core::read_mesh(file).unwrap();
    (mesh.num_vertices(), mesh.num_cells())
}
