use std::f64::consts::PI;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squeezed-dqpt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn rate_peaks_at_first_critical_time() {
    let o = bin(&["rate", "--sites", "2000", "--tmax", "4", "--steps", "801"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["t", "lambda"]);
    assert_eq!(rows.len(), 801);
    let (t_peak, _) = rows
        .iter()
        .map(|r| (r[0].parse::<f64>().unwrap(), r[1].parse::<f64>().unwrap()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let t_c = PI / (2.0 * 0.375f64.sqrt());
    assert!(
        (t_peak - t_c).abs() < 0.02,
        "peak at {t_peak}, expected near {t_c}"
    );
}

#[test]
fn literal_sign_flag_flips_the_rate() {
    let a = stdout(&bin(&[
        "rate", "--sites", "100", "--tmax", "3", "--steps", "31",
    ]));
    let b = stdout(&bin(&[
        "rate",
        "--sites",
        "100",
        "--tmax",
        "3",
        "--steps",
        "31",
        "--paper-sign",
    ]));
    for (ra, rb) in csv_rows(&a).1.iter().zip(csv_rows(&b).1.iter()) {
        let (x, y): (f64, f64) = (ra[1].parse().unwrap(), rb[1].parse().unwrap());
        assert!((x + y).abs() < 1e-15);
    }
}

#[test]
fn scan_finds_induced_dqpts() {
    let o = bin(&[
        "scan",
        "--h0",
        "0.8",
        "--h1",
        "0.2",
        "--r-steps",
        "16",
        "--phi-steps",
        "16",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["r", "phi", "delta"]);
    assert_eq!(rows.len(), 256);
    let small = rows
        .iter()
        .filter(|r| r[2].parse::<f64>().unwrap() < 1e-6)
        .count();
    assert!(small > 0);
}

#[test]
fn validate_reports_all_checks() {
    let o = bin(&["validate", "--samples", "500"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["overall_pass"], true);
    assert_eq!(report["config"]["kernel"], "momentum-sum");
    let checks = report["per_check"].as_array().unwrap();
    assert_eq!(checks.len(), 6);
    for c in checks {
        assert!(c["name"].is_string() && c["pass"].as_bool().unwrap());
        assert!(c["max_abs_error"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn literal_pairing_kernel_fails_validation() {
    let o = bin(&[
        "validate",
        "--samples",
        "100",
        "--r",
        "0.3",
        "--kernel",
        "pairing-integral",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["overall_pass"], false);
}

#[test]
fn output_is_deterministic() {
    let args = [
        "zeros",
        "--r",
        "0.3",
        "--phi",
        "0.7",
        "--n-max",
        "2",
        "--k-samples",
        "64",
    ];
    assert_eq!(bin(&args).stdout, bin(&args).stdout);
    let scan = ["scan", "--r-steps", "8", "--phi-steps", "8"];
    assert_eq!(bin(&scan).stdout, bin(&scan).stdout);
}

#[test]
fn csv_values_round_trip() {
    let text = stdout(&bin(&["entropy", "--sites", "40", "--r", "0.2"]));
    for row in csv_rows(&text).1 {
        for cell in row {
            let x: f64 = cell.parse().unwrap();
            assert_eq!(format!("{x:.16e}"), cell);
        }
    }
}

#[test]
fn json_output_and_file_target() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pairing.json");
    let o = bin(&[
        "pairing",
        "--d-max",
        "4",
        "--format",
        "json",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v.is_object() || v.is_array());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(
        &path,
        "h0 = 0.8\nh1 = 0.2\nsites = 64\ntmax = 2\nsteps = 5\npaper_sign = true\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let from_file = stdout(&bin(&["rate", "--config", p]));
    let explicit = stdout(&bin(&[
        "rate",
        "--h0",
        "0.8",
        "--h1",
        "0.2",
        "--sites",
        "64",
        "--tmax",
        "2",
        "--steps",
        "5",
        "--paper-sign",
    ]));
    assert_eq!(from_file, explicit);
    let overridden = stdout(&bin(&["rate", "--config", p, "--steps", "7"]));
    assert_eq!(csv_rows(&overridden).1.len(), 7);
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    assert_eq!(bin(&["rate", "--help"]).status.code(), Some(0));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bin(&["rate", "--sites", "7"]).status.code(), Some(1));
    assert_eq!(bin(&["rate", "--gamma0", "nan"]).status.code(), Some(1));
    assert_eq!(bin(&["validate", "--sites", "14"]).status.code(), Some(1));
    let coarse = bin(&["phase", "--k", "1.0", "--tmax", "100", "--steps", "3"]);
    assert_eq!(coarse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&coarse.stderr).contains("refine"));
}
