//! Exit-code contract of the command-line front end on the shipped configs.

use pftc::cli::{cmd_roa, cmd_simulate, cmd_synth, cmd_verify, main_with_args, sibling, EXIT_OK, EXIT_REFUTED, EXIT_USAGE};
use pftc::config::{ControllerFile, RoaFile, RunReport};
use std::path::{Path, PathBuf};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn cfg(name: &str) -> PathBuf {
    configs().join(name)
}

#[test]
fn synth_verify_simulate_and_roa_on_the_two_state_vehicle() {
    let dir = tempfile::tempdir().unwrap();
    let ctrl = dir.path().join("auv2.toml");
    assert_eq!(cmd_synth(&cfg("auv2.toml"), &ctrl), EXIT_OK);
    let report = RunReport::from_toml_str(&std::fs::read_to_string(sibling(&ctrl, "report.toml")).unwrap()).unwrap();
    assert_eq!(report.outcome, "converged");
    assert!(report.iterations <= 50);

    assert_eq!(cmd_verify(&cfg("auv2.toml"), &ctrl), EXIT_OK);

    // A sign-flipped gain cannot be certified.
    let mut file = ControllerFile::load(&ctrl).unwrap();
    for row in file.k.iter_mut().chain(file.h.iter_mut().flatten()) {
        row.iter_mut().for_each(|v| *v = -*v);
    }
    let flipped = dir.path().join("flipped.toml");
    std::fs::write(&flipped, file.to_toml().unwrap()).unwrap();
    assert_eq!(cmd_verify(&cfg("auv2.toml"), &flipped), EXIT_REFUTED);

    let trace = dir.path().join("trace.csv");
    assert_eq!(cmd_simulate(&cfg("auv2.toml"), &ctrl, &cfg("auv2_three_phase.toml"), &trace), EXIT_OK);
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.lines().any(|l| l.starts_with("t,x1,x2,u1,u2,u3")));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 3001);
    assert!(sibling(&trace, "metrics.toml").exists());

    let roa = dir.path().join("roa.toml");
    assert_eq!(cmd_roa(&cfg("auv2.toml"), &ctrl, &roa), EXIT_OK);
    let roa = RoaFile::from_toml_str(&std::fs::read_to_string(&roa).unwrap()).unwrap();
    assert!(roa.feasible && roa.trace_q > 0.0);
    assert_eq!(roa.boundary.map(|b| b.len()), Some(360));
}

#[test]
fn uncontrollable_system_is_reported_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.toml");
    assert_eq!(cmd_synth(&cfg("linear_uncontrollable.toml"), &out), EXIT_REFUTED);
    assert!(!out.exists());
    let report = RunReport::from_toml_str(&std::fs::read_to_string(sibling(&out, "report.toml")).unwrap()).unwrap();
    assert_eq!(report.outcome, "infeasible");
}

#[test]
fn bare_gain_cannot_be_verified_and_wrong_shapes_are_rejected() {
    let published = cfg("auv2_published_gain.toml");
    assert_eq!(cmd_verify(&cfg("auv2.toml"), &published), EXIT_USAGE);
    assert_eq!(cmd_verify(&cfg("auv5.toml"), &published), EXIT_USAGE);
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        cmd_simulate(&cfg("auv5.toml"), &published, &cfg("auv5_sinusoid.toml"), &dir.path().join("t.csv")),
        EXIT_USAGE
    );
}

#[test]
fn published_gain_tracks_through_the_fault_phases() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("published.csv");
    let code = cmd_simulate(&cfg("auv2.toml"), &cfg("auv2_published_gain.toml"), &cfg("auv2_three_phase.toml"), &trace);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn argument_parsing_and_missing_files() {
    assert_eq!(main_with_args(["pftc", "--help"]), EXIT_OK);
    assert_eq!(main_with_args(["pftc", "frobnicate"]), EXIT_USAGE);
    assert_eq!(main_with_args(["pftc", "synth", "--config", "/nonexistent.toml", "--out", "/tmp/x.toml"]), EXIT_USAGE);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[model]\nname = \"auv2\"\nunknown_key = 1\n").unwrap();
    assert_eq!(cmd_synth(&bad, &dir.path().join("out.toml")), EXIT_USAGE);
}
