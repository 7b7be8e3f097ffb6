use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rydgate"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL_GATE: &str = "experiment = gate
F_S = 0.1763437 V/cm
F_RF = 0.04920619 V/cm
nu = 49.756527 MHz
T_wait1 = 22.7026 ns
T_wait2 = 35.9369 ns
rtol = 1e-8
atol = 1e-10
sample_dt = 10 ns
";

#[test]
fn empty_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "empty.conf", "");
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("experiment"));
}

#[test]
fn bad_key_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.conf", "experiment = gate\nF_S = 0.17\n");
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn unknown_figure_rejected() {
    let out = bin().args(["reproduce", "fig9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig9"));
}

#[test]
fn reruns_are_byte_identical_and_echo_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "gate.conf", SMALL_GATE);
    let run = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = bin().arg("run").arg(&cfg).arg("--out").arg(&out_dir).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let (a, b) = (run("a"), run("b"));
    let mut csvs = 0;
    for entry in std::fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        if name.to_string_lossy().ends_with(".csv") {
            csvs += 1;
            assert_eq!(std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap(), "{name:?}");
        }
    }
    assert!(csvs >= 3);
    let echo = std::fs::read_to_string(a.join("config.resolved")).unwrap();
    assert!(echo.contains("experiment = gate"));
    assert!(echo.contains("# default"), "defaults are marked");
    assert!(std::fs::read_to_string(a.join("summary.txt")).unwrap().contains("average fidelity"));
}
