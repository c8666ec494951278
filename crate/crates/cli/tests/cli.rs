use std::fs;
use std::path::Path;
use std::process::Command;

fn cli() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_maxwell-cfm"));
    c.env("RUST_LOG", "warn");
    c
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    let out = dir.join("out");
    fs::write(&path, format!("{body}\noutput_dir = {:?}\n", out.display().to_string())).unwrap();
    path
}

#[test]
fn run_writes_errors_with_config_header() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "name = \"small\"\nproblem = \"manufactured\"\nscheme = \"cfm-yee\"\nh = 0.05\nt_final = 0.1\nsnapshot_every = 2");
    let status = cli().args(["run", "--config"]).arg(&config).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let errors = fs::read_to_string(dir.path().join("out/errors.csv")).unwrap();
    assert!(errors.starts_with('#'));
    assert!(errors.contains("problem = \"manufactured\""));
    assert!(dir.path().join("out/small_ez_4.csv").exists());
}

#[test]
fn longtime_writes_a_series() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "problem = \"manufactured\"\nscheme = \"cfm-yee\"\nh = 0.05\nerror_every = 2");
    let status = cli().args(["longtime", "--config"]).arg(&config).args(["--T", "0.2"]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let series = fs::read_to_string(dir.path().join("out/longtime.csv")).unwrap();
    let rows = series.lines().filter(|l| !l.starts_with('#')).count();
    // header row plus samples at steps 0, 2, 4, 6, 8
    assert_eq!(rows, 6);
}

#[test]
fn invalid_configs_exit_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    for body in [
        "problem = \"scattering-magnetic\"\nboundary = \"embedded\"\nh = 0.05",
        "problem = \"manufactured\"\nh = 0.03",
        "problem = \"manufactured\"\nh = 0.05\nunknown_key = 1",
        "problem = \"manufactured\"\nh = 0.05\nalpha = 100.0",
    ] {
        let config = write_config(dir.path(), body);
        let status = cli().args(["run", "--config"]).arg(&config).status().unwrap();
        assert_eq!(status.code(), Some(3), "{body}");
    }
    let status = cli().args(["run", "--config"]).arg(dir.path().join("missing.toml")).status().unwrap();
    assert_eq!(status.code(), Some(3));
}
