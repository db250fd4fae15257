//! Runner for numbered acceptance checks. Each check returns a verdict and a
//! one-line summary; the runner prints one line per check and a final tally.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

pub struct Verdict {
    pub passed: bool,
    pub summary: String,
}

impl Verdict {
    pub fn new(passed: bool, summary: impl Into<String>) -> Self {
        Self { passed, summary: summary.into() }
    }
}

pub struct Check {
    pub id: u32,
    pub title: &'static str,
    pub run: fn() -> Verdict,
}

/// Runs every check, printing `criterion <id> PASS|FAIL` lines. Returns true when all pass.
pub fn run_all(checks: &[&Check]) -> bool {
    let mut failed = Vec::new();
    for c in checks {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Verdict::new(false, format!("panicked: {msg}"))
        });
        let status = if verdict.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {} {status} [{:.1}s] {}: {}",
            c.id,
            start.elapsed().as_secs_f64(),
            c.title,
            verdict.summary
        );
        if !verdict.passed {
            failed.push(c.id);
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed.len(), checks.len());
    if !failed.is_empty() {
        println!("failed: {failed:?}");
    }
    failed.is_empty()
}

/// Selects checks by id from command-line style filters; no filter keeps all.
pub fn select<'a>(checks: &'a [Check], filters: &[String]) -> Vec<&'a Check> {
    let ids: Vec<u32> = filters.iter().filter_map(|f| f.parse().ok()).collect();
    checks.iter().filter(|c| ids.is_empty() || ids.contains(&c.id)).collect()
}
