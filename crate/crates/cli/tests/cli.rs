use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlwe-channel"))
        .args(args)
        .output()
        .unwrap()
}

fn fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn toy_noise_matches_exact_oracle_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "noise",
        "--scheme",
        "toy_n2q17",
        "--exact",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let psi = std::fs::read_to_string(dir.path().join("psi.pmf")).unwrap();
    assert_eq!(psi, fixture("toy_n2q17_psi.pmf"));
    for name in ["chi", "xi", "zeta", "eta", "rho_u", "rho_v"] {
        assert!(dir.path().join(format!("{name}.pmf")).exists(), "{name}");
    }
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("H(psi)"));
    assert_eq!(stdout.lines().filter(|l| l.starts_with("Q=")).count(), 7);
}

#[test]
fn kyber_psi_file_has_one_line_per_residue() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "noise",
        "--scheme",
        "kyber1024",
        "--precision",
        "128",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let psi = std::fs::read_to_string(dir.path().join("psi.pmf")).unwrap();
    assert_eq!(psi.lines().count(), 1 + 3329);
}

#[test]
fn zero_trials_is_a_usage_error() {
    let out = run(&["simulate", "--scheme", "toy_n2q17", "-Q", "2", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulation_is_reproducible() {
    let args = [
        "simulate",
        "--scheme",
        "toy_n8q97",
        "-Q",
        "4",
        "--trials",
        "5000",
        "--seed",
        "c0ffee",
    ];
    let a = run(&args);
    let b = run(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("coefficient,errors,trials"));
    assert_eq!(text.lines().count(), 1 + 8);
}

#[test]
fn uncompressed_toy_simulation_passes_the_bound() {
    let out = run(&["simulate", "--scheme", "toy_n2q17", "-Q", "3", "--trials", "20000"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn capacity_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "capacity",
        "--scheme",
        "toy_n16q257",
        "--precision",
        "128",
        "-Q",
        "2-4,16",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "Q,bits_per_coeff_full,bits_per_coeff_quant,plain_per_cipher_full,plain_per_cipher_quant"
    );
    assert_eq!(lines.len(), 5);
    for l in &lines[1..] {
        let cells: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cells[2] <= cells[1] + 1e-4, "{l}");
    }
    assert!(dir.path().join("report.json").exists());
    assert_eq!(
        std::fs::read_to_string(dir.path().join("capacity_toy_n16q257.csv")).unwrap(),
        text
    );
}

#[test]
fn capacity_rejects_alphabet_above_q() {
    let out = run(&["capacity", "--scheme", "toy_n2q17", "-Q", "18"]);
    assert!(!out.status.success());
}

#[test]
fn code_search_commands() {
    let out = run(&["gv-search", "--n", "1024", "--d", "31", "-Q", "4"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "907");
    let out = run(&["bch-search", "--n-max", "15", "--d", "5", "-Q", "2", "--narrow-sense"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "n=15 k=7 b=1");
}

#[test]
fn find_d_on_a_toy() {
    let out = run(&[
        "find-d",
        "--scheme",
        "toy_n16q257",
        "--precision",
        "128",
        "-Q",
        "2",
        "--target",
        "-10",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("Q,d,t,log2_Pr_E,log2_DFR"));
    let dfr: f64 = text.lines().nth(1).unwrap().split(',').nth(4).unwrap().parse().unwrap();
    assert!(dfr < -10.0);
}

#[test]
fn unknown_scheme_fails() {
    let out = run(&["noise", "--scheme", "no-such-scheme"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-scheme"));
}
