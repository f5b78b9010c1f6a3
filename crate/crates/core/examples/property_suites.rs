// The seeded property suites at reduced size, as a smoke run.
//
// Run with `cargo run --release --example property_suites -- 42`.

use subjective_calibration::suites::{run_all, SuiteSizes, DEFAULT_SEED};

fn main() -> subjective_calibration::error::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED);
    let sizes = SuiteSizes {
        sufficiency: 1_000,
        necessity: 50,
        oracle: 20,
        remark_binary: 200,
        remark_general: 100,
    };
    for report in run_all(seed, sizes)? {
        println!(
            "{} {}",
            if report.passed() { "PASS" } else { "FAIL" },
            report.summary()
        );
        for v in &report.violations {
            println!("  {v}");
        }
    }
    Ok(())
}
