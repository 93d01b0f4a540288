//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use koehler_core::battery::{
    cyclicity_suite, decomposition_suite, idempotent_cross_oracle, ip_suite, markov_suite, positivity_suite,
    semigroup_suite, BatteryConfig,
};
use koehler_core::report::CheckBlock;
use koehler_core::semigroup::{from_transformations, idempotents, Transformation};

const SEED: u64 = 20_240_601;

struct Line {
    id: u8,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn summarize(block: &CheckBlock) -> String {
    let fixtures = block.certificates["fixtures"].as_u64().unwrap_or(0);
    if block.passed() {
        format!("{fixtures} cases")
    } else {
        let failures = &block.certificates["failures"];
        let errors = &block.certificates["errors"];
        format!("violations {:?}; failures {failures}; errors {errors}", block.violations())
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> CheckBlock) -> (bool, String) {
    let start = Instant::now();
    let block = f();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let mut detail = summarize(&block);
    detail.push_str(&format!(", {:.1} s", elapsed.as_secs_f64()));
    if let Some(l) = limit {
        detail.push_str(&format!(" (limit {} s)", l.as_secs()));
    }
    (block.passed() && in_time, detail)
}

fn t3_against_oracle() -> (bool, String) {
    let oracle: serde_json::Value =
        serde_json::from_str(include_str!("fixtures/t3_oracle.json")).expect("oracle fixture");
    let t = |v: &[usize]| Transformation::new(v.to_vec()).unwrap();
    let s = from_transformations(&[t(&[1, 2, 0]), t(&[1, 0, 2]), t(&[1, 1, 2])], 100).unwrap();
    let c = from_transformations(&[t(&[1, 2, 0]), t(&[1, 0, 2]), t(&[0, 0, 0])], 100).unwrap();
    let ok = oracle["size"] == s.size()
        && oracle["idempotents"] == idempotents(&s).len()
        && oracle["generated_with_constant"] == c.size();
    (ok, format!("size {}, idempotents {}, constant-generated size {}", s.size(), idempotents(&s).len(), c.size()))
}

fn battery_report(bin: &str) -> Result<String, String> {
    let out = Command::new(bin).args(["battery", "--seed", "7"]).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    v.as_object_mut().ok_or("report is not an object")?.remove("wall_time_ms");
    Ok(v.to_string())
}

fn main() -> ExitCode {
    let cfg = BatteryConfig { seed: SEED, count: 50, cyclicity_count: 500, exec: Default::default() };
    let mut lines = Vec::new();

    let (passed, detail) = timed(Some(Duration::from_secs(30)), || idempotent_cross_oracle(&cfg));
    lines.push(Line { id: 1, title: "spectral and dynamical idempotents agree", passed, detail });

    let (passed, detail) = timed(None, || decomposition_suite(&cfg));
    lines.push(Line { id: 2, title: "reversible/stable decomposition properties", passed, detail });

    let (passed, detail) = timed(None, || positivity_suite(&cfg));
    lines.push(Line { id: 3, title: "positive projection and induced lattice", passed, detail });

    let (passed, detail) = timed(Some(Duration::from_secs(120)), || cyclicity_suite(&cfg));
    lines.push(Line { id: 4, title: "cyclic peripheral spectrum matches Perron-Frobenius oracle", passed, detail });

    let (passed, detail) = timed(None, || markov_suite(&cfg));
    lines.push(Line { id: 5, title: "composition operators: multiplicative, Markov, powers of eigenvectors", passed, detail });

    let (suite_ok, suite_detail) = timed(None, semigroup_suite);
    let (oracle_ok, oracle_detail) = t3_against_oracle();
    lines.push(Line {
        id: 6,
        title: "finite semigroup exactness",
        passed: suite_ok && oracle_ok,
        detail: format!("{oracle_detail}; {suite_detail}"),
    });

    let (passed, detail) = timed(None, || ip_suite(&cfg));
    lines.push(Line { id: 7, title: "finite sums, return sets and FS witnesses", passed, detail });

    let bin = env!("CARGO_BIN_EXE_koehler");
    let (passed, detail) = match (battery_report(bin), battery_report(bin)) {
        (Ok(a), Ok(b)) if a == b => (true, format!("two runs identical ({} bytes)", a.len())),
        (Ok(_), Ok(_)) => (false, "reports differ".to_string()),
        (Err(e), _) | (_, Err(e)) => (false, e),
    };
    lines.push(Line { id: 8, title: "battery --seed 7 is deterministic", passed, detail });

    for l in &lines {
        println!("{} criterion {}: {} [{}]", if l.passed { "PASS" } else { "FAIL" }, l.id, l.title, l.detail);
    }
    let failed = lines.iter().filter(|l| !l.passed).count();
    println!("acceptance: {} passed, {failed} failed", lines.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
