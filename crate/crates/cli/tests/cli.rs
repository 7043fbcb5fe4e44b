mod common;

use std::fs;

use common::{covar, dataset, run_in};
use serde_json::Value;

fn stdout(args: &[&str]) -> (i32, String, String) {
    let out = covar().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json_field(text: &str, key: &str) -> Value {
    serde_json::from_str::<Value>(text).unwrap()[key].clone()
}

#[test]
fn limits_clayton_example() {
    let (code, out, _) = stdout(&[
        "limits", "--family", "clayton", "--theta", "1", "--q", "0.5", "--p", "0.1", "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    assert!((json_field(&out, "v_qp_asymptotic").as_f64().unwrap() - 0.1).abs() < 1e-12);
    // C(p, v) = (1/p + 1/v - 1)^-1 = qp gives v = 1/11.
    assert!((json_field(&out, "v_qp_exact").as_f64().unwrap() - 1.0 / 11.0).abs() < 1e-9);
}

#[test]
fn limits_kappa_mode() {
    let (code, out, _) = stdout(&["limits", "--kappa", "2", "--xi", "0", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(json_field(&out, "delta_covar_limit").as_f64(), Some(0.0));
    let (_, out, _) = stdout(&["limits", "--kappa", "1", "--format", "csv"]);
    assert!(out.contains("delta_covar_limit,-1\n"));
}

#[test]
fn limits_usage_errors_exit_2() {
    for args in [
        &["limits"][..],
        &["limits", "--family", "clayton"],
        &["limits", "--family", "clayton", "--theta", "-1"],
        &[
            "limits", "--family", "clayton", "--theta", "1", "--kappa", "2",
        ],
        &["limits", "--no-such-flag"],
        &["limits", "--kappa", "0.5"],
    ] {
        let (code, _, err) = stdout(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("c.toml"),
        "kappa = 1.0\nxi = 0.0\ngamma = 2.0\nformat = \"csv\"\n",
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &["limits", "--config", "c.toml", "--gamma", "1"],
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.contains("gamma,1\n") && text.contains("delta_covar_limit,-1\n"),
        "{text}"
    );

    fs::write(dir.path().join("bad.toml"), "unknown = 1\n").unwrap();
    assert_eq!(
        run_in(dir.path(), &["limits", "--config", "bad.toml"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run_in(dir.path(), &["limits", "--config", "missing.toml"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn simulate_is_deterministic_and_reports_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate",
        "--family",
        "frank",
        "--theta",
        "1",
        "--deterministic-only",
        "--out",
        "a",
    ];
    assert!(run_in(dir.path(), &args).status.success());
    let first = fs::read(dir.path().join("a/report.csv")).unwrap();
    assert!(run_in(dir.path(), &args).status.success());
    assert_eq!(first, fs::read(dir.path().join("a/report.csv")).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("# schema_version=1\n# config={"));
    let last = text
        .lines()
        .rfind(|l| l.contains("v_exact_over_p"))
        .unwrap();
    let value: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!((value - (1.0 - (-1f64).exp())).abs() < 0.02 * value);
}

#[test]
fn simulate_rejects_uncatalogued_and_unwritable() {
    let (code, _, _) = stdout(&["simulate", "--family", "gaussian", "--rho", "0.5"]);
    assert_eq!(code, 2);
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("file"), "").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "simulate",
            "--family",
            "frank",
            "--theta",
            "1",
            "--deterministic-only",
            "--out",
            "file/sub",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("file/sub"));
}

#[test]
fn estimate_comonotone_and_independent() {
    let dir = tempfile::tempdir().unwrap();
    let como: String = std::iter::once("u,v\n".to_string())
        .chain((1..=1000).map(|i| format!("{0},{0}\n", i as f64 / 1001.0)))
        .collect();
    fs::write(dir.path().join("como.csv"), como).unwrap();
    let out = run_in(dir.path(), &["estimate", "--input", "como.csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(json_field(&text, "regime"), "attraction");
    let r = json_field(&text, "r_hat").as_f64().unwrap();
    assert!((r - 0.05).abs() < 0.01, "r_hat {r}");

    // Two unrelated permutations of 1..=n.
    let n = 10_000u64;
    let ind: String = std::iter::once("z_i,z_s\n".to_string())
        .chain((0..n).map(|i| format!("{},{}\n", (i * 7919) % n, (i * 6007 + 13) % n)))
        .collect();
    fs::write(dir.path().join("ind.csv"), ind).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "estimate", "--input", "ind.csv", "--k", "400", "--out", "est",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(dir.path().join("est/estimate.json")).unwrap();
    assert_eq!(json_field(&text, "regime"), "balance");
}

#[test]
fn estimate_data_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.csv"), "u,v\n0.1,0.2\n0.3,abc\n").unwrap();
    let out = run_in(dir.path(), &["estimate", "--input", "bad.csv"]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("'v'"), "{err}");

    fs::write(dir.path().join("short.csv"), "u,v\n0.1,0.2\n0.3,0.4\n").unwrap();
    assert_eq!(
        run_in(dir.path(), &["estimate", "--input", "short.csv"])
            .status
            .code(),
        Some(4)
    );
    fs::write(dir.path().join("cols.csv"), "a,b\n0.1,0.2\n").unwrap();
    assert_eq!(
        run_in(dir.path(), &["estimate", "--input", "cols.csv"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        run_in(dir.path(), &["estimate", "--input", "nope.csv"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn analyze_synthetic_clayton_amplifies() {
    let dir = tempfile::tempdir().unwrap();
    let input = dataset();
    let out = run_in(
        dir.path(),
        &["analyze", "--input", input.to_str().unwrap(), "--out", "o"],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = fs::read_to_string(dir.path().join("o/report.csv")).unwrap();
    let mut windows = 0;
    for line in report.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[3], "ok");
        if f[6] == "delta_covar" && f[8].is_empty() {
            windows += 1;
            assert!(f[7].parse::<f64>().unwrap() < 0.0, "{line}");
        }
    }
    assert_eq!(windows, 3);
    let series = fs::read_to_string(dir.path().join("o/series.csv")).unwrap();
    for line in series.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let f: Vec<f64> = line
            .split(',')
            .skip(3)
            .map(|x| x.parse().unwrap())
            .collect();
        assert!(f[2] <= f[1], "CoVaR above VaR: {line}");
    }
}

#[test]
fn analyze_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = dataset();
    let out = run_in(
        dir.path(),
        &[
            "analyze",
            "--input",
            input.to_str().unwrap(),
            "--window",
            "5000",
        ],
    );
    assert_eq!(out.status.code(), Some(4));
    fs::write(
        dir.path().join("d.csv"),
        "date,value_i,value_s\n03/01/2000,0.1,0.2\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["analyze", "--input", "d.csv"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ISO-8601"));
    fs::write(
        dir.path().join("o.csv"),
        "date,value_i,value_s\n2000-01-04,0.1,0.2\n2000-01-03,0.1,0.2\n",
    )
    .unwrap();
    assert_eq!(
        run_in(dir.path(), &["analyze", "--input", "o.csv"])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn analyze_all_windows_failing_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("date,value_i,value_s\n");
    let mut d = chrono_free_dates();
    for _ in 0..300 {
        text.push_str(&format!("{},0.01,0.02\n", d.next().unwrap()));
    }
    fs::write(dir.path().join("flat.csv"), text).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "analyze", "--input", "flat.csv", "--window", "300", "--out", "o",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(5),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(fs::read_to_string(dir.path().join("o/report.csv"))
        .unwrap()
        .contains("skipped"));
}

fn chrono_free_dates() -> impl Iterator<Item = String> {
    (1990..).flat_map(|y| {
        (1..=12).flat_map(move |m| (1..=28).map(move |d| format!("{y}-{m:02}-{d:02}")))
    })
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = stdout(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["limits", "simulate", "estimate", "analyze", "synth"] {
        assert!(out.contains(sub));
    }
}
