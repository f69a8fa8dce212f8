//! Cross-check of the O(n) exact sampler against the small-dimension
//! rejection oracle: two-sample KS on a few scalar statistics.
//!
//! Run with: cargo run --release --example exact_vs_oracle

use lorentz_lab::gof::ks_two_sample;
use lorentz_lab::norms::lorentz_norm;
use lorentz_lab::qindex::QIndex;
use lorentz_lab::rng::RngStreamSpec;
use lorentz_lab::sampler::{sample_exact, sample_rejection_oracle, BallParams, Normalization};

fn main() -> lorentz_lab::Result<()> {
    let count = 20_000;
    for (q, n) in [(QIndex::Finite(2.0), 3), (QIndex::Finite(1.5), 5), (QIndex::Infinite, 4)] {
        let params = BallParams::lorentz(q, n, Normalization::Unit)?;
        let exact = sample_exact(params, count, RngStreamSpec::new(42, 0))?;
        let oracle = sample_rejection_oracle(params, count, RngStreamSpec::new(42, 1))?;
        println!(
            "q = {q}, n = {n} (oracle acceptance rate {:.4})",
            oracle.acceptance_rate.unwrap()
        );
        let stats: [(&str, fn(&[f64], QIndex) -> f64); 3] = [
            ("first coordinate", |row, _| row[0]),
            ("max |x_i|", |row, _| row.iter().fold(0.0f64, |m, v| m.max(v.abs()))),
            ("Lorentz norm", |row, q| lorentz_norm(row, q)),
        ];
        for (name, f) in stats {
            let a: Vec<f64> = exact.rows().map(|r| f(r, q)).collect();
            let b: Vec<f64> = oracle.rows().map(|r| f(r, q)).collect();
            let ks = ks_two_sample(&a, &b)?;
            println!("  {name:<18} KS = {:.5}  p = {:.3}", ks.statistic, ks.p_value);
        }
        // membership is structural for the exact sampler, but check anyway
        let inside = exact.rows().all(|r| lorentz_norm(r, q) < 1.0);
        println!("  all {count} exact rows strictly inside: {inside}");
    }
    Ok(())
}
