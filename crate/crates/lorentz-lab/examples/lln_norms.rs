//! Law of large numbers for ℓ_r norms on the volume-normalized ball:
//! n^{-1/r}‖X‖_r concentrates at the closed-form constant m_{q,r}.
//!
//! Run with: cargo run --release --example lln_norms

use lorentz_lab::constants::lln_constant;
use lorentz_lab::experiments::run_lln_norm;
use lorentz_lab::qindex::{ExtReal, QIndex};
use lorentz_lab::rng::RngStreamSpec;

fn main() -> lorentz_lab::Result<()> {
    let grid = [
        (QIndex::Finite(2.0), ExtReal::Finite(2.0)),
        (QIndex::Finite(2.0), ExtReal::Infinite),
        (QIndex::Finite(3.0), ExtReal::Finite(1.5)),
        (QIndex::Infinite, ExtReal::Finite(1.0)),
        (QIndex::Infinite, ExtReal::Infinite),
    ];
    println!("{:>5} {:>5} {:>12} {:>12} {:>10}", "q", "r", "m_qr", "empirical", "rel dev");
    for (q, r) in grid {
        let m = lln_constant(q, r)?;
        let rep = run_lln_norm(q, r, 50_000, 100, RngStreamSpec::new(31, 0))?;
        println!(
            "{:>5} {:>5} {:>12.7} {:>12.7} {:>10.2e}  {:?}",
            q, r, m, rep.statistics["empirical_mean"], rep.statistics["rel_deviation"], rep.verdict
        );
    }
    Ok(())
}
