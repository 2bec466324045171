//! End-to-end checks of the ssmri binary through its public interface.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ssmri(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssmri"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = ssmri(dir, args);
    assert!(
        out.status.success(),
        "command {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn csv_rows(path: &Path) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "h,rate,seed,lambda,beta,rlne,iters,seconds");
    lines.map(str::to_owned).collect()
}

/// Strips the wall-time column, the one field that may differ between runs.
fn without_seconds(row: &str) -> &str {
    &row[..row.rfind(',').unwrap()]
}

#[test]
fn full_sampling_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    ok(dir, &["phantom", "--size", "64", "--out", "phantom.cplx", "--pgm", "phantom.pgm"]);
    let pgm = fs::read(dir.join("phantom.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n64 64\n65535\n"));

    ok(
        dir,
        &[
            "simulate", "--in", "phantom.cplx", "--h", "0.25", "--rate", "1.0", "--seed", "3",
            "--out-kspace", "ks.cplx", "--out-mask", "mask.txt",
        ],
    );
    // Full sampling with a stiff data weight must reproduce the input.
    ok(
        dir,
        &[
            "reconstruct", "--kspace", "ks.cplx", "--mask", "mask.txt", "--h", "0.25",
            "--lambda", "256000000", "--ref", "phantom.cplx", "--out", "recon.cplx",
            "--csv", "runs.csv",
        ],
    );
    let rows = csv_rows(&dir.join("runs.csv"));
    assert_eq!(rows.len(), 1);
    let fields: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(fields[0], "0.25");
    assert_eq!(fields[1], "1");
    let err: f64 = fields[5].parse().unwrap();
    assert!(err < 1e-3, "full-sampling rlne {err}");
}

#[test]
fn outputs_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    ok(dir, &["phantom", "--size", "32", "--out", "a.cplx"]);
    ok(dir, &["phantom", "--size", "32", "--out", "b.cplx"]);
    assert_eq!(fs::read(dir.join("a.cplx")).unwrap(), fs::read(dir.join("b.cplx")).unwrap());

    for tag in ["x", "y"] {
        ok(
            dir,
            &[
                "simulate", "--in", "a.cplx", "--h", "0.5", "--rate", "0.5", "--sigma", "0.01",
                "--seed", "9", "--out-kspace", &format!("ks_{tag}.cplx"),
                "--out-mask", &format!("mask_{tag}.txt"),
            ],
        );
        ok(
            dir,
            &[
                "reconstruct", "--kspace", &format!("ks_{tag}.cplx"),
                "--mask", &format!("mask_{tag}.txt"), "--h", "0.5", "--ref", "a.cplx",
                "--out", &format!("recon_{tag}.cplx"), "--csv", &format!("{tag}.csv"),
            ],
        );
    }
    for name in ["ks", "mask", "recon"] {
        let ext = if name == "mask" { "txt" } else { "cplx" };
        assert_eq!(
            fs::read(dir.join(format!("{name}_x.{ext}"))).unwrap(),
            fs::read(dir.join(format!("{name}_y.{ext}"))).unwrap(),
            "{name} outputs differ between identical runs"
        );
    }
    let x = csv_rows(&dir.join("x.csv"));
    let y = csv_rows(&dir.join("y.csv"));
    assert_eq!(x.len(), 1);
    assert_eq!(without_seconds(&x[0]), without_seconds(&y[0]));
}

#[test]
fn sweep_tabulates_each_cell() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    ok(dir, &["phantom", "--size", "32", "--out", "phantom.cplx"]);
    ok(
        dir,
        &[
            "sweep", "--in", "phantom.cplx", "--h-list", "0,0.25", "--rate", "0.6",
            "--seeds", "1,2", "--csv", "sweep.csv",
        ],
    );
    let rows = csv_rows(&dir.join("sweep.csv"));
    assert_eq!(rows.len(), 4);
    let cells: Vec<(String, String)> = rows
        .iter()
        .map(|r| {
            let f: Vec<&str> = r.split(',').collect();
            (f[0].to_owned(), f[2].to_owned())
        })
        .collect();
    assert_eq!(
        cells,
        [("0", "1"), ("0", "2"), ("0.25", "1"), ("0.25", "2")]
            .map(|(h, s)| (h.to_owned(), s.to_owned()))
    );
    for row in &rows {
        let rlne: f64 = row.split(',').nth(5).unwrap().parse().unwrap();
        assert!(rlne.is_finite() && rlne > 0.0 && rlne < 1.0, "rlne out of range in {row}");
    }
}

#[test]
fn coherence_prints_a_stable_table() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let args = ["coherence", "--n", "16", "--h-list", "0,0.25", "--dict", "haar:2"];
    let first = ok(dir, &args);
    let second = ok(dir, &args);
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "h,mu");
    assert_eq!(lines.len(), 3);
    for line in &lines[1..] {
        let mu: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(mu >= 1.0 - 1e-12 && mu <= 4.0, "mu out of range: {line}");
    }
}

#[test]
fn errors_are_single_line_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();

    let out = ssmri(
        dir,
        &[
            "reconstruct", "--kspace", "nope.cplx", "--mask", "m.txt", "--h", "0",
            "--out", "r.cplx",
        ],
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    let last = stderr.lines().last().unwrap();
    assert!(last.starts_with("error: "), "diagnostic line: {last}");
    assert!(last.contains("nope.cplx"), "diagnostic names the file: {last}");

    let out = ssmri(
        dir,
        &[
            "reconstruct", "--kspace", "k.cplx", "--mask", "m.txt", "--h", "0",
            "--wavelet", "sym8", "--out", "r.cplx",
        ],
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.lines().last().unwrap().contains("sym8"));
}
