//! Acceptance battery. Run with
//! `cargo test -p lanczos-cli --test acceptance -- --nocapture`
//! to see one line per criterion.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use lanczos_cli::battery::{battery_potentials, reciprocity_case, run_criterion, CRITERIA};
use lanczos_cli::Check;

struct Outcome {
    id: u8,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn summarize(checks: &[Check]) -> (bool, String) {
    let passed = checks.iter().all(Check::passed);
    let worst = checks
        .iter()
        .find(|c| !c.passed())
        .or_else(|| checks.first());
    (passed, worst.map(ToString::to_string).unwrap_or_default())
}

fn criterion_1(out: &Path) -> Outcome {
    let limit = Duration::from_secs(60);
    let mut checks = Vec::new();
    let mut slowest = Duration::ZERO;
    for (label, a, b, v) in battery_potentials() {
        let start = Instant::now();
        checks.push(reciprocity_case(label, a, b, &v, out).expect("reciprocity run"));
        slowest = slowest.max(start.elapsed());
    }
    let (ok, detail) = summarize(&checks);
    Outcome {
        id: 1,
        title: CRITERIA[0].1,
        passed: ok && slowest <= limit,
        detail: format!(
            "{detail}; slowest potential {:.2} s (limit 60 s)",
            slowest.as_secs_f64()
        ),
    }
}

fn battery_criterion(id: u8, out: &Path) -> Outcome {
    let title = CRITERIA[id as usize - 1].1;
    match run_criterion(id, out) {
        Ok(report) => {
            let (passed, detail) = summarize(&report.checks);
            Outcome {
                id,
                title,
                passed,
                detail: format!("{} checks; {detail}", report.checks.len()),
            }
        }
        Err(e) => Outcome {
            id,
            title,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn verify_all(dir: &Path, config: &Path) -> (Option<i32>, Vec<u8>) {
    let output = Command::new(env!("CARGO_BIN_EXE_lanczos"))
        .arg("verify-all")
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("spawn lanczos");
    (output.status.code(), output.stdout)
}

fn sorted_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion_9(scratch: &Path) -> Outcome {
    let config = scratch.join("verify.cfg");
    fs::write(
        &config,
        "# battery parameters are fixed; the config only has to be valid\n[grid]\nn = 400\n",
    )
    .unwrap();
    let (a, b) = (scratch.join("run_a"), scratch.join("run_b"));
    let (code_a, stdout_a) = verify_all(&a, &config);
    let (code_b, stdout_b) = verify_all(&b, &config);
    let (files_a, files_b) = (sorted_files(&a), sorted_files(&b));
    let identical = stdout_a == stdout_b && files_a == files_b;
    Outcome {
        id: 9,
        title: "determinism",
        passed: identical && code_a == Some(0) && code_b == Some(0) && !files_a.is_empty(),
        detail: format!(
            "exit codes {code_a:?}/{code_b:?}; {} CSV files; stdout and files byte-identical: {identical}",
            files_a.len()
        ),
    }
}

#[test]
fn acceptance_criteria() {
    let scratch = tempfile::tempdir().unwrap();
    let out = scratch.path().join("battery");

    let mut outcomes = vec![criterion_1(&out)];
    for id in 2..=8 {
        outcomes.push(battery_criterion(id, &out));
    }
    outcomes.push(criterion_9(scratch.path()));

    for o in &outcomes {
        println!(
            "criterion {} ({}): {} - {}",
            o.id,
            o.title,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let failed: Vec<u8> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
