//! Empirical-measure convergence: the coordinates of one high-dimensional
//! sample approach the compactly supported law ν_{q,1}.
//!
//! Run with: cargo run --release --example empirical_limit

use lorentz_lab::experiments::run_empirical_convergence;
use lorentz_lab::qindex::QIndex;
use lorentz_lab::rng::RngStreamSpec;

fn main() -> lorentz_lab::Result<()> {
    for q in [QIndex::Finite(1.5), QIndex::Finite(2.0), QIndex::Finite(3.0), QIndex::Infinite] {
        let report = run_empirical_convergence(q, 100_000, RngStreamSpec::new(7, 0))?;
        println!(
            "q = {q}: KS = {:.5} (band {:.3}) -> {:?}",
            report.statistics["ks_distance"],
            report.tolerances["max_ks_distance"],
            report.verdict
        );
    }
    // near q = 1 the family degenerates to the two-sided exponential
    let report = run_empirical_convergence(QIndex::Finite(1.001), 100_000, RngStreamSpec::new(7, 0))?;
    println!("q = 1.001 vs two-sided exponential:");
    println!("{}", report.to_json()?);
    Ok(())
}
