//! Runs the full verification suite through the library API (the same code
//! path as `bethe-twist verify`), prints the summary table, and inspects
//! individual check reports programmatically.
//!
//! Run with: `cargo run --example verification_suite`

use bethe_twist::config::RunConfig;
use bethe_twist::suite::{run_suite, Suite};
use bethe_twist::Result;

fn main() -> Result<()> {
    // The default configuration: length-4 chain, c = 1, rational
    // inhomogeneities, a generic twist, exact arithmetic, seed 42.
    let config = RunConfig::default();
    let report = run_suite(&config, Suite::All)?;
    print!("{}", report.summary_table());

    let failed: Vec<&str> = report
        .reports()
        .filter(|r| !r.pass)
        .map(|r| r.name.as_str())
        .collect();
    assert!(failed.is_empty(), "failing checks: {failed:?}");

    // Single suites can be run in isolation, and the JSON report is stable:
    // identical configuration and seed reproduce it byte for byte.
    let twist_only = run_suite(&config, Suite::Twist)?;
    println!(
        "twist suite alone: {} checks, all passing: {}",
        twist_only.reports().count(),
        twist_only.all_pass()
    );
    let json_a = twist_only.to_json()?;
    let json_b = run_suite(&config, Suite::Twist)?.to_json()?;
    assert_eq!(json_a, json_b);
    println!("reports are deterministic: {} bytes, byte-identical across runs", json_a.len());
    Ok(())
}
