//! Schechtman–Schmuckenschläger threshold: vol(𝔻_{q,1} ∩ t𝔻_r) jumps from
//! 0 to 1 as t crosses 1/A_{q,r}.
//!
//! Run with: cargo run --release --example intersection_thresholds

use lorentz_lab::constants::intersection_threshold;
use lorentz_lab::experiments::run_intersection;
use lorentz_lab::qindex::{ExtReal, QIndex};
use lorentz_lab::rng::RngStreamSpec;

fn main() -> lorentz_lab::Result<()> {
    let (q, r) = (QIndex::Finite(2.0), ExtReal::Finite(2.0));
    let c = intersection_threshold(q, r)?;
    println!("A_{{q,r}} = {:.7} (identity c/m = {:.7})", c.a_qr, c.c_qr / c.m_qr);
    println!("{:>8} {:>8} {:>10}", "t", "A*t", "estimate");
    for k in 0..9 {
        let t = (0.6 + 0.1 * k as f64) / c.a_qr;
        let rep = run_intersection(q, r, t, 10_000, 4_000, RngStreamSpec::new(3, k as u64))?;
        println!("{:>8.4} {:>8.2} {:>10.4}", t, c.a_qr * t, rep.statistics["estimate"]);
    }
    Ok(())
}
