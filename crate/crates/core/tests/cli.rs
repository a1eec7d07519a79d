//! End-to-end runs of the `mwrn` binary.

use std::path::Path;
use std::process::{Command, Output};

use mwrn::output::{format_sig, read_csv};

fn mwrn(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwrn"))
        .args(args)
        .env("MWRN_OUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn coeffs_writes_rational_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = mwrn(&["coeffs"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let a = std::fs::read_to_string(dir.path().join("coeffs_a.csv")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("coeffs_b.csv")).unwrap();
    // 4 x 4 classes, 6 relay multipliers, 3 downlink multipliers
    assert_eq!(a.lines().count(), 1 + 16 * 6);
    assert_eq!(b.lines().count(), 1 + 16 * 3);
    assert!(a.lines().any(|l| l == "0,0,1,-7,4"));
}

#[test]
fn invalid_order_fails_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let o = mwrn(&["ser-sim", "mod_order=15"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("mod_order must be a perfect square"));
    assert!(!dir.path().join("ser_sim.csv").exists());
}

#[test]
fn unknown_key_is_named_with_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "users = 4\nbogus = 1\n").unwrap();
    let o = mwrn(&["rates", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(!o.status.success());
    let msg = stderr(&o);
    assert!(msg.contains("line 2") && msg.contains("bogus"), "{msg}");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "users = 10\nframes = 3\nscheme = mirror\nsnr_db_start = 10\nsnr_db_stop = 20\n").unwrap();
    let o = mwrn(&["ser-analytic", "-c", cfg.to_str().unwrap(), "users=4"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(std::fs::File::open(dir.path().join("ser_analytic.csv")).unwrap()).unwrap();
    // 3 grid points x (other, end_user)
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.scheme == "mirror"));
}

#[test]
fn output_rows_survive_a_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = mwrn(&["ser-sim", "users=4", "frames=2", "symbols=10", "--svg"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("ser_sim.csv")).unwrap();
    assert!(text.starts_with("snr_db,scheme,scenario,metric,user_role,value,stderr,n_events,unreliable"));
    let rows = read_csv(text.as_bytes()).unwrap();
    for (line, row) in text.lines().skip(1).zip(&rows) {
        let value = line.split(',').nth(5).unwrap();
        assert_eq!(format_sig(row.value), value);
    }
    assert!(rows.iter().any(|r| r.unreliable), "30 dB with 10 symbols should be sparse");
    assert!(dir.path().join("ser_sim_ser.svg").exists());
}

#[test]
fn unwritable_output_fails() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let o = mwrn(&["coeffs", &format!("out={}", blocker.join("sub").display())], dir.path());
    assert!(!o.status.success());
    assert!(!stderr(&o).is_empty());
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["ser-sim", "users=4", "frames=5", "symbols=40", "seed=17"];
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = mwrn(&[&args[..], &[&format!("out={}", out.display())]].concat(), dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(std::fs::read(out.join("ser_sim.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}
