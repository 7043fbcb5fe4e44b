#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn covar() -> Command {
    Command::new(env!("CARGO_BIN_EXE_covar"))
}

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn dataset() -> PathBuf {
    crate_dir().join("data").join("synthetic_clayton.csv")
}

pub fn run_in(dir: &Path, args: &[&str]) -> Output {
    covar()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

/// Commands whose outputs are pinned under `tests/golden/<name>/`.
pub const GOLDEN: [(&str, &[&str]); 2] = [
    (
        "analyze",
        &[
            "analyze",
            "--input",
            "synthetic_clayton.csv",
            "--out",
            "analyze",
        ],
    ),
    (
        "simulate",
        &[
            "simulate",
            "--family",
            "clayton",
            "--theta",
            "2",
            "--n",
            "1000,4000",
            "--reps",
            "5",
            "--seed",
            "11",
            "--out",
            "simulate",
        ],
    ),
];

/// Run a golden command in a scratch directory and compare every pinned file
/// byte for byte. With `UPDATE_GOLDEN` set the pinned files are rewritten.
pub fn check_golden(name: &str, args: &[&str]) -> Result<usize, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    fs::copy(dataset(), tmp.path().join("synthetic_clayton.csv")).map_err(|e| e.to_string())?;
    let out = run_in(tmp.path(), args);
    if !out.status.success() {
        return Err(format!(
            "{name} exited with {:?}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let produced = tmp.path().join(name);
    let golden = crate_dir().join("tests").join("golden").join(name);
    let mut files: Vec<_> = fs::read_dir(&produced)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    files.sort();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(&golden).map_err(|e| e.to_string())?;
        for f in &files {
            fs::copy(produced.join(f), golden.join(f)).map_err(|e| e.to_string())?;
        }
    }
    for f in &files {
        let got = fs::read(produced.join(f)).map_err(|e| e.to_string())?;
        let want =
            fs::read(golden.join(f)).map_err(|e| format!("{}: {e}", golden.join(f).display()))?;
        if got != want {
            return Err(format!(
                "{name}/{} differs from the golden copy",
                f.to_string_lossy()
            ));
        }
    }
    Ok(files.len())
}
