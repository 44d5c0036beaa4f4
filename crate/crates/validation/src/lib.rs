//! Reporting helpers for the acceptance run.

use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {} [{}] {}: {} ({:.1?})",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed
        )
    }
}

/// Runs one criterion, turning panics into failures, and prints its line.
pub fn check<F>(id: u32, name: &'static str, body: F) -> Outcome
where
    F: FnOnce() -> Result<String, String>,
{
    let start = Instant::now();
    let result = panic::catch_unwind(AssertUnwindSafe(body));
    let (passed, detail) = match result {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (false, format!("panicked: {msg}"))
        }
    };
    let outcome = Outcome {
        id,
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    };
    println!("{outcome}");
    outcome
}

/// Fails with `msg` unless `cond` holds.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Fails when `elapsed` exceeds `limit`.
pub fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, || {
        format!("took {elapsed:.1?}, limit {limit:.0?}")
    })
}

/// Upper end of the exponent-trend sweep, `SYSTOLE_TREND_NMAX` or 150.
pub fn trend_n_max() -> i64 {
    std::env::var("SYSTOLE_TREND_NMAX")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n: &i64| n >= 40)
        .unwrap_or(150)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_become_failures() {
        let o = check(0, "demo", || panic!("boom"));
        assert!(!o.passed);
        assert!(o.detail.contains("boom"));
        let ok = check(0, "demo", || Ok("fine".into()));
        assert!(ok.passed);
        assert!(ok.to_string().contains("[PASS]"));
    }

    #[test]
    fn ensure_and_within() {
        assert!(ensure(true, || "x".into()).is_ok());
        assert_eq!(ensure(false, || "x".into()), Err("x".into()));
        assert!(within(Duration::from_secs(1), Duration::from_secs(2)).is_ok());
        assert!(within(Duration::from_secs(3), Duration::from_secs(2)).is_err());
    }
}
