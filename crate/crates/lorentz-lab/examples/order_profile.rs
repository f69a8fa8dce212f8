//! Order-statistic profile: the ordered coordinates of a tilde-scaled sample
//! hug the deterministic curve G_q(k/n) within a log(n)·δ_n band.
//!
//! Run with: cargo run --release --example order_profile

use lorentz_lab::constants::profile_delta;
use lorentz_lab::experiments::run_order_statistic_profile;
use lorentz_lab::limit_law::g_profile;
use lorentz_lab::qindex::QIndex;
use lorentz_lab::rng::RngStreamSpec;
use lorentz_lab::sampler::{sample_weyl_chamber, BallParams, Normalization};

fn main() -> lorentz_lab::Result<()> {
    let q = QIndex::Finite(3.0);
    let n = 100_000;

    // one row against the profile at a few quantiles
    let params = BallParams::lorentz(q, n, Normalization::Tilde)?;
    let batch = sample_weyl_chamber(params, 1, RngStreamSpec::new(5, 0))?;
    let row = batch.row(0);
    println!("{:>6} {:>12} {:>12}", "t", "observed", "G_q(t)");
    for &t in &[0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99] {
        let k = ((t * n as f64) as usize).min(n - 1);
        println!("{t:>6.2} {:>12.6} {:>12.6}", row[k], g_profile(q, t));
    }

    let rep = run_order_statistic_profile(q, n, 100, RngStreamSpec::new(5, 1))?;
    println!(
        "band log(n)·δ_n = {:.4}: {}% of rows inside, max deviation {:.5} -> {:?}",
        (n as f64).ln() * profile_delta(q, n),
        100.0 * rep.statistics["pass_fraction"],
        rep.statistics["max_deviation"],
        rep.verdict
    );
    Ok(())
}
