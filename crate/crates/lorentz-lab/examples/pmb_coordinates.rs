//! Poincaré–Maxwell–Borel effect: the first k coordinates of a tilde-scaled
//! sample decouple into i.i.d. ν_{q,1} draws as n grows.
//!
//! Run with: cargo run --release --example pmb_coordinates

use lorentz_lab::experiments::run_pmb;
use lorentz_lab::qindex::QIndex;
use lorentz_lab::rng::RngStreamSpec;

fn main() -> lorentz_lab::Result<()> {
    let q = QIndex::Finite(2.0);
    for n in [100usize, 1_000, 10_000] {
        let report = run_pmb(q, n, 2, 10_000, RngStreamSpec::new(13, 0))?;
        println!(
            "n = {n:>6}: marginal KS = {:.4}, |corr| = {:.4}, chi2(24) = {:.1} -> {:?}",
            report.statistics["max_marginal_ks"],
            report.statistics["abs_corr_abs"],
            report.statistics["chi2_grid"],
            report.verdict
        );
    }
    Ok(())
}
