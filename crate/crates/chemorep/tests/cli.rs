//! Driver-level tests: config precedence, output determinism, exit-status
//! contracts, and the VTK/mesh file surfaces.

use chemorep::config::{parse_config, Mode, Overrides, RunConfig};
use chemorep::workflows::{cmd_converge, cmd_run, cmd_stability};
use std::path::Path;
use std::process::Command;

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {path:?}: {e}"))
}

fn tiny_converge_config(out: &Path) -> RunConfig {
    RunConfig {
        mode: Mode::Converge,
        meshes: vec![6, 8],
        k: 1e-4,
        t_final: 5e-4,
        out_dir: out.to_path_buf(),
        ..RunConfig::default()
    }
}

#[test]
fn converge_outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let mut sink = std::io::sink();
    cmd_converge(&tiny_converge_config(&out_a), &mut sink).unwrap();
    cmd_converge(&tiny_converge_config(&out_b), &mut sink).unwrap();
    for entry in std::fs::read_dir(&out_a).unwrap() {
        let name = entry.unwrap().file_name();
        let a = read(&out_a.join(&name));
        let b = read(&out_b.join(&name));
        assert_eq!(a, b, "nondeterministic output in {name:?}");
    }
}

#[test]
fn converge_writes_all_tables_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = tiny_converge_config(dir.path());
    let mut sink = std::io::sink();
    cmd_converge(&config, &mut sink).unwrap();
    for (name, _, _) in chemorep::workflows::TABLES {
        let path = dir.path().join(format!("table_{name}.csv"));
        let text = read(&path);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), &format!("m,{name},order"));
        // First row has no order entry, second row does.
        let first = lines.next().unwrap();
        assert!(first.starts_with("6,") && first.ends_with(','));
        let second = lines.next().unwrap();
        assert!(second.starts_with("8,") && !second.ends_with(','));
    }
    let summary = read(&dir.path().join("summary.csv"));
    assert!(summary.starts_with("table,least_squares_order\n"));
    assert_eq!(
        summary.lines().count(),
        1 + chemorep::workflows::TABLES.len()
    );
}

#[test]
fn run_writes_diagnostics_errors_and_vtk() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        mode: Mode::Run,
        meshes: vec![4],
        k: 1e-4,
        t_final: 4e-4,
        snapshots: 2,
        out_dir: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    let mut sink = std::io::sink();
    cmd_run(&config, &mut sink).unwrap();
    let steps = read(&dir.path().join("steps.csv"));
    assert_eq!(steps.lines().count(), 5); // header + 4 steps
    let errors = read(&dir.path().join("errors.csv"));
    assert!(errors.contains("u_l2,"));
    assert!(dir.path().join("state_final.vtk").exists());
    assert!(dir.path().join("state_000002.vtk").exists());
    assert!(dir.path().join("state_000004.vtk").exists());
    let vtk = read(&dir.path().join("state_final.vtk"));
    assert!(vtk.starts_with("# vtk DataFile Version 3.0"));
}

#[test]
fn stability_passes_on_reference_data() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        mode: Mode::Stability,
        meshes: vec![8],
        k: 1e-3,
        t_final: 2e-2,
        out_dir: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    let mut sink = std::io::sink();
    let outcome = cmd_stability(&config, &mut sink).unwrap();
    assert!(outcome.ok, "violation: {:?}", outcome.first_violation);
    let csv = read(&dir.path().join("stability.csv"));
    assert_eq!(
        csv.lines().next().unwrap(),
        "n,t,energy,energy_law_residual,mass,picard_or_newton_iters"
    );
    assert_eq!(csv.lines().count(), 21);
}

#[test]
fn failed_sweep_flushes_partial_tables_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        // One nonlinear iteration can never reach 1e-14, so every mesh
        // run fails and the sweep reports the failure while still writing
        // the summary scaffold.
        max_nl_iter: Some(1),
        tol: 1e-14,
        ..tiny_converge_config(dir.path())
    };
    let mut sink = std::io::sink();
    let err = cmd_converge(&config, &mut sink).unwrap_err();
    assert!(err.to_string().contains("iteration failed"));
    assert!(dir.path().join("summary.csv").exists());
}

#[test]
fn config_file_plus_flag_overrides() {
    let file = "mode = \"stability\"\nm = 12\ntol = 1e-5\n";
    let overrides = Overrides {
        tol: Some(1e-7),
        ..Default::default()
    };
    let config = parse_config(Some(file), &overrides).unwrap();
    assert_eq!(config.mode, Mode::Stability);
    assert_eq!(config.meshes, vec![12]);
    assert_eq!(config.tol, 1e-7);
}

// --- Binary-level exit-status contracts ---------------------------------

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chemorep"))
}

#[test]
fn binary_stability_exits_zero_on_success() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["stability", "--m", "6", "--k", "1e-3", "--T", "1e-2"])
        .args(["--out", dir.path().to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn binary_rejects_bad_flags_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    // Non-integral T/k.
    let status = bin()
        .args(["run", "--m", "4", "--k", "3e-4", "--T", "1e-3"])
        .args(["--out", dir.path().to_str().unwrap()])
        .status()
        .unwrap();
    assert!(!status.success());
    // Unknown method.
    let status = bin()
        .args(["run", "--m", "4", "--method", "gauss"])
        .args(["--out", dir.path().to_str().unwrap()])
        .status()
        .unwrap();
    assert!(!status.success());
    // Unknown subcommand.
    let status = bin().arg("explode").status().unwrap();
    assert!(!status.success());
}

#[test]
fn binary_rejects_unknown_config_key() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("bad.toml");
    std::fs::write(&config_path, "not_a_key = 1\n").unwrap();
    let status = bin()
        .args(["run", "--config", config_path.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(!status.success());
}
