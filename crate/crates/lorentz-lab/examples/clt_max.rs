//! Fluctuations of the maximum coordinate: three regimes depending on q.
//!
//! Run with: cargo run --release --example clt_max

use lorentz_lab::constants::clt_constants;
use lorentz_lab::experiments::run_clt_max;
use lorentz_lab::kappa::kappa;
use lorentz_lab::qindex::QIndex;
use lorentz_lab::rng::RngStreamSpec;

fn main() -> lorentz_lab::Result<()> {
    let (n, m) = (50_000usize, 800usize);
    for qv in [1.0, 1.5, 2.0, 3.0] {
        let q = QIndex::Finite(qv);
        let c = clt_constants(&kappa(q, n))?;
        let report = run_clt_max(q, n, m, RngStreamSpec::new(21, 0))?;
        print!("q = {qv}: regime {:?}, mu_qn = {:.6}", c.regime, c.mu_qn);
        if let Some(s2) = c.sigma_sq {
            print!(", sigma^2 = {s2:.6}");
        }
        if let Some(ks) = report.statistics.get("ks_distance") {
            print!(", KS = {ks:.4}");
        }
        if let Some(p) = report.statistics.get("p_value") {
            print!(", p = {p:.3}");
        }
        println!(" -> {:?}", report.verdict);
    }
    Ok(())
}
