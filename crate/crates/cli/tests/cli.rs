use std::path::Path;
use std::process::{Command, Output};

use cesaro_core::phi::{phi_closed, phi_curve, read_curve_csv};

fn cesaro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cesaro"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Value of a `key = value` line.
fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

fn number(text: &str, key: &str) -> f64 {
    field(text, key).parse().unwrap()
}

/// Parses `re +imi`.
fn complex(text: &str, key: &str) -> (f64, f64) {
    let value = field(text, key);
    let (re, im) = value.split_once(' ').unwrap();
    (
        re.parse().unwrap(),
        im.trim_end_matches('i').parse().unwrap(),
    )
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn curve_csv_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("phi.csv");
    let out = cesaro(&["phi-curve", "--out", path_arg(&file)]);
    assert!(out.status.success());
    let bytes = std::fs::read(&file).unwrap();
    assert!(!bytes.contains(&b'\r'));
    let rows = read_curve_csv(bytes.as_slice()).unwrap();
    let expected = phi_curve(1.05, 10.0, 896).unwrap();
    assert_eq!(rows.len(), 896);
    for (row, pt) in rows.iter().zip(&expected) {
        assert_eq!(*row, (pt.p, pt.phi, pt.phi_prime));
    }

    let minima: Vec<_> = rows
        .windows(3)
        .filter(|w| w[1].1 < w[0].1 && w[1].1 < w[2].1)
        .map(|w| w[1])
        .collect();
    assert_eq!(minima.len(), 1);
    let (p, phi, prime) = minima[0];
    assert!((p - 2.0).abs() < 1e-12);
    assert!((phi - 1.0).abs() <= 1e-12);
    assert!(prime.unwrap().abs() <= 1e-9);
}

#[test]
fn two_step_curve_and_stdout() {
    let out = cesaro(&[
        "phi-curve",
        "--p-min",
        "1.05",
        "--p-max",
        "10",
        "--steps",
        "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows = read_curve_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].1, phi_closed(1.05).unwrap().phi);
    assert_eq!(rows[1].1, phi_closed(10.0).unwrap().phi);
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn curve_svg() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("phi.svg");
    let out = cesaro(&["phi-curve", "--format", "svg", "--out", path_arg(&file)]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(&file).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert!(svg.contains(r#"viewBox="0 0 800 600""#));
    assert!(svg.contains(">Phi(p)</text>"));
}

#[test]
fn verify_status_matches_report() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.csv");
    let out = cesaro(&["verify", "--out", path_arg(&file)]);
    let mut reader = csv::Reader::from_path(&file).unwrap();
    let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(reader.headers().unwrap().get(6), Some("passed"));
    let all_passed = records.iter().all(|r| &r[6] == "true");
    assert_eq!(out.status.code(), Some(if all_passed { 0 } else { 1 }));

    let phi_row = records
        .iter()
        .find(|r| &r[1] == "phi_closed(2) = 1")
        .unwrap();
    assert!((phi_row[2].parse::<f64>().unwrap() - 1.0).abs() <= 1e-12);
    assert_eq!(&phi_row[6], "true");
    let criteria: std::collections::BTreeSet<u8> =
        records.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(criteria.len(), 13);

    let text = stdout(&out);
    assert_eq!(text.lines().count(), records.len() + 1);
}

#[test]
fn ratio_command() {
    let out = cesaro(&["ratio", "--p", "2", "--t", "1"]);
    assert!(out.status.success());
    assert!((number(&stdout(&out), "ratio") - 1.0).abs() <= 1e-9);

    let a = stdout(&cesaro(&["ratio", "--p", "3", "--t", "7"]));
    let b = stdout(&cesaro(&["ratio", "--p", "3", "--t", "0.1"]));
    for key in ["ratio_pth_power", "ratio", "phi", "phi_root"] {
        assert!((number(&a, key) - number(&b, key)).abs() <= 2e-8, "{key}");
    }
    assert_eq!(field(&a, "ratio"), field(&b, "ratio"));
}

#[test]
fn search_command() {
    let out = cesaro(&["search", "--p", "4", "--kernels", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(number(&text, "best_ratio") >= number(&text, "phi_root"));

    let args = [
        "search",
        "--p",
        "2",
        "--kernels",
        "3",
        "--seed",
        "11",
        "--budget",
        "150",
    ];
    let first = cesaro(&args);
    assert!(first.status.success());
    assert!(number(&stdout(&first), "best_ratio") <= 1.0 + 1e-8);
    assert_eq!(first.stdout, cesaro(&args).stdout);
}

#[test]
fn cesaro_eval_command() {
    let text = stdout(&cesaro(&[
        "cesaro-eval",
        "--t",
        "1",
        "--p",
        "2",
        "--z-re",
        "0",
        "--z-im",
        "1",
    ]));
    for key in ["C_numeric", "C_closed"] {
        let (re, im) = complex(&text, key);
        assert!(re.abs() <= 1e-9 && (im - 0.5).abs() <= 1e-9, "{key}");
    }
    assert!(number(&text, "C_abs_diff") <= 1e-9);
    assert!(number(&text, "V_abs_diff") <= 1e-9);

    let origin = stdout(&cesaro(&["cesaro-eval", "--p", "2", "--z-im", "0"]));
    assert_eq!(complex(&origin, "C_numeric"), (0.0, 1.0));

    let negative = stdout(&cesaro(&[
        "cesaro-eval",
        "--p",
        "3",
        "--z-re",
        "-2",
        "--z-im",
        "0.5",
    ]));
    assert!(number(&negative, "V_abs_diff") <= 1e-9);
}

#[test]
fn exit_codes() {
    assert_eq!(cesaro(&["ratio", "--p", "1"]).status.code(), Some(2));
    assert_eq!(
        cesaro(&["cesaro-eval", "--p", "2", "--z-im", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cesaro(&["ratio", "--p", "3", "--tol", "1e-2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cesaro(&["ratio", "--p", "3", "--tol", "1e-13"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cesaro(&["ratio", "--p", "3", "--format", "svg"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cesaro(&["phi-curve", "--p-min", "2", "--p-max", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        cesaro(&["search", "--p", "3", "--kernels", "9"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cesaro(&["bogus"]).status.code(), Some(2));
    // |V f_t|^p decays like |x|^-1.001, too slowly for the quadrature to converge.
    let slow = cesaro(&["ratio", "--p", "1.001"]);
    assert_eq!(slow.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&slow.stderr).contains("no convergence"));
}
