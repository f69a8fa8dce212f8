//! Full-scale acceptance suite: one runner per release criterion, shared by
//! the `selftest` subcommand and the integration test. Each criterion pins
//! its sizes, tolerances and seeds; unit tests cover the same code paths at
//! desk scale.

use crate::constants::intersection_threshold;
use crate::error::Result;
use crate::experiments::{
    run_clt_max, run_empirical_convergence, run_intersection, run_lln_norm,
    run_order_statistic_profile, run_pmb,
};
use crate::gamma::ln_gamma;
use crate::gof::ks_two_sample;
use crate::ode::{
    conjecture_density, energy_constraint_residual, find_critical_slope,
    find_critical_slope_with, StepControl,
};
use crate::qindex::{ExtReal, QIndex};
use crate::rng::RngStreamSpec;
use crate::sampler::{
    sample_exact, sample_rejection_oracle, BallParams, Normalization, SampleBatch,
};
use crate::volume::{ball_volume, volume_radius_asymptotic};

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

/// Default master seed of the suite; every criterion derives its streams
/// from it, so the whole run is reproducible.
pub const DEFAULT_SEED: u64 = 1789;

pub fn run_all(master_seed: u64) -> Vec<CriterionResult> {
    let criteria: [(usize, &'static str, fn(u64) -> Result<(bool, String)>); 10] = [
        (1, "sampler-oracle equivalence", criterion_oracle),
        (2, "exact volume", criterion_volume),
        (3, "empirical limit law", criterion_empirical),
        (4, "coordinate block independence", criterion_pmb),
        (5, "max-coordinate fluctuations", criterion_clt),
        (6, "norm law of large numbers", criterion_lln),
        (7, "intersection threshold", criterion_threshold),
        (8, "conjectured density ODE", criterion_ode),
        (9, "order-statistic profile", criterion_profile),
        (10, "determinism", criterion_determinism),
    ];
    criteria
        .iter()
        .map(|&(id, name, f)| match f(master_seed) {
            Ok((passed, details)) => CriterionResult { id, name, passed, details },
            Err(e) => CriterionResult { id, name, passed: false, details: format!("error: {e}") },
        })
        .collect()
}

fn batch_stat(batch: &SampleBatch, which: usize) -> Vec<f64> {
    match which {
        0 => batch.column(0),
        1 => batch.rows().map(|r| r.iter().fold(0.0f64, |a, &v| a.max(v.abs()))).collect(),
        _ => batch.rows().map(|r| r.iter().map(|v| v.abs()).sum()).collect(),
    }
}

fn criterion_oracle(seed: u64) -> Result<(bool, String)> {
    let configs = [
        (2usize, QIndex::Finite(2.0)),
        (3, QIndex::Finite(2.0)),
        (3, QIndex::Infinite),
        (4, QIndex::Finite(1.5)),
    ];
    let mut worst_p = 1.0f64;
    for (idx, &(n, q)) in configs.iter().enumerate() {
        let params = BallParams::lorentz(q, n, Normalization::Unit)?;
        let sid = 10 * idx as u64;
        let exact = sample_exact(params, 100_000, RngStreamSpec::new(seed, sid))?;
        let oracle = sample_rejection_oracle(params, 100_000, RngStreamSpec::new(seed, sid + 1))?;
        for stat in 0..3 {
            let p = ks_two_sample(&batch_stat(&exact, stat), &batch_stat(&oracle, stat))?.p_value;
            worst_p = worst_p.min(p);
        }
    }
    Ok((worst_p > 0.01, format!("worst KS p-value {worst_p:.4} (need > 0.01)")))
}

fn criterion_volume(seed: u64) -> Result<(bool, String)> {
    let mut worst_rel = 0.0f64;
    for (idx, &n) in [2usize, 3, 4].iter().enumerate() {
        for (jdx, &q) in
            [QIndex::Finite(2.0), QIndex::Finite(4.0), QIndex::Infinite].iter().enumerate()
        {
            let vol = ball_volume(q, n);
            let expected_rate = (vol.log_volume - n as f64 * 2f64.ln()).exp();
            // request the count that makes ~10^6 proposals
            let count = (1e6 * expected_rate).round() as usize;
            let params = BallParams::lorentz(q, n, Normalization::Unit)?;
            let batch = sample_rejection_oracle(
                params,
                count,
                RngStreamSpec::new(seed, 100 + (3 * idx + jdx) as u64),
            )?;
            let rate = batch.acceptance_rate.unwrap();
            worst_rel = worst_rel.max((rate / expected_rate - 1.0).abs());
        }
    }
    let mut radius_ok = true;
    // the relative correction to the radius asymptotics is
    // ~ |ζ(1-1/q)|/(q-1) · n^{-1/q}, which at q = 4 is still 6.9% at
    // n = 10^5; the 5% window is only reached around n = 10^6 there
    for &(qv, n) in &[(1.5, 100_000usize), (2.0, 100_000), (4.0, 1_000_000)] {
        let q = QIndex::Finite(qv);
        let ratio = ball_volume(q, n).radius(n) / volume_radius_asymptotic(q, n);
        radius_ok &= (0.95..=1.05).contains(&ratio);
    }
    let ratio_inf = ball_volume(QIndex::Infinite, 1_000_000).radius(1_000_000)
        / volume_radius_asymptotic(QIndex::Infinite, 1_000_000);
    radius_ok &= (0.9..=1.1).contains(&ratio_inf);
    let pass = worst_rel < 0.01 && radius_ok;
    Ok((pass, format!("worst rate deviation {worst_rel:.4} (need < 0.01), radius asymptotics ok: {radius_ok}")))
}

fn criterion_empirical(seed: u64) -> Result<(bool, String)> {
    let mut pass = true;
    let mut details = Vec::new();
    // the q = ∞ empirical measure converges at the 1/log n profile rate:
    // the deterministic mean-profile bias alone is ≈ 0.025 at n = 10^5, so
    // that case carries the rate-aware band from the report instead of 1%
    for (idx, &q) in [QIndex::Finite(2.0), QIndex::Finite(3.0), QIndex::Infinite].iter().enumerate()
    {
        let rep = run_empirical_convergence(q, 100_000, RngStreamSpec::new(seed, 200 + idx as u64))?;
        let ks = rep.statistics["ks_distance"];
        pass &= rep.passed();
        details.push(format!("q={q}: KS {ks:.4}"));
    }
    let rep =
        run_empirical_convergence(QIndex::Finite(1.001), 10_000, RngStreamSpec::new(seed, 210))?;
    let ks = rep.statistics["ks_distance_two_sided_exp"];
    pass &= ks < 0.05;
    details.push(format!("q=1.001 vs double-exp: KS {ks:.4}"));
    Ok((pass, details.join(", ")))
}

fn criterion_pmb(seed: u64) -> Result<(bool, String)> {
    let rep = run_pmb(QIndex::Finite(2.0), 10_000, 2, 10_000, RngStreamSpec::new(seed, 300))?;
    let ks = rep.statistics["max_marginal_ks"];
    let corr = rep.statistics["abs_corr_abs"];
    Ok((
        ks < 0.02 && corr < 0.05,
        format!("marginal KS {ks:.4} (need < 0.02), |corr| {corr:.4} (need < 0.05)"),
    ))
}

fn criterion_clt(seed: u64) -> Result<(bool, String)> {
    let mut pass = true;
    let mut details = Vec::new();
    // the q = 3 statistic's variance converges like n^{-1/3} log n: its
    // standard deviation is still 1.30 σ_q at n = 10^5 (KS ≈ 0.063 against
    // the limit law no matter how many replications), so that regime is
    // checked at n = 2·10^6 where the deterministic distance is ≈ 0.030
    let cases: [(f64, usize, &str, f64); 3] = [
        (3.0, 2_000_000, "ks_distance", 0.05),
        (2.0, 100_000, "ks_distance", 0.07),
        (1.0, 100_000, "ks_distance", 0.05),
    ];
    for (idx, &(q, n, key, band)) in cases.iter().enumerate() {
        let rep = run_clt_max(
            QIndex::Finite(q),
            n,
            2_000,
            RngStreamSpec::new(seed, 400 + 2 * idx as u64),
        )?;
        let v = rep.statistics[key];
        pass &= v < band;
        details.push(format!("q={q}: KS {v:.4} (need < {band})"));
    }
    let rep = run_clt_max(QIndex::Finite(1.5), 100_000, 2_000, RngStreamSpec::new(seed, 410))?;
    let p = rep.statistics["p_value"];
    pass &= p > 0.01;
    details.push(format!("q=1.5 two-sample p {p:.4} (need > 0.01)"));
    Ok((pass, details.join(", ")))
}

fn criterion_lln(seed: u64) -> Result<(bool, String)> {
    let grid = [
        (QIndex::Finite(2.0), ExtReal::Finite(2.0)),
        (QIndex::Finite(2.0), ExtReal::Infinite),
        (QIndex::Infinite, ExtReal::Finite(1.0)),
        (QIndex::Infinite, ExtReal::Finite(2.0)),
        (QIndex::Infinite, ExtReal::Infinite),
        (QIndex::Finite(3.0), ExtReal::Finite(1.5)),
    ];
    let mut pass = true;
    let mut worst_finite = 0.0f64;
    let mut worst_inf = 0.0f64;
    for (idx, &(q, r)) in grid.iter().enumerate() {
        let rep = run_lln_norm(q, r, 100_000, 200, RngStreamSpec::new(seed, 500 + idx as u64))?;
        pass &= rep.passed();
        let dev = rep.statistics["rel_deviation"];
        if q == QIndex::Infinite {
            worst_inf = worst_inf.max(dev);
        } else {
            worst_finite = worst_finite.max(dev);
        }
    }
    Ok((
        pass,
        format!(
            "worst relative deviation {worst_finite:.5} finite q (need < 0.01), {worst_inf:.5} at q=inf (log-rate band)"
        ),
    ))
}

fn criterion_threshold(seed: u64) -> Result<(bool, String)> {
    let grid = [
        (QIndex::Finite(2.0), ExtReal::Finite(2.0)),
        (QIndex::Infinite, ExtReal::Finite(2.0)),
        (QIndex::Finite(2.0), ExtReal::Infinite),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (idx, &(q, r)) in grid.iter().enumerate() {
        let a = intersection_threshold(q, r)?.a_qr;
        let hi = run_intersection(q, r, 1.2 / a, 10_000, 10_000, RngStreamSpec::new(seed, 600 + 2 * idx as u64))?;
        let lo = run_intersection(q, r, 0.8 / a, 10_000, 10_000, RngStreamSpec::new(seed, 601 + 2 * idx as u64))?;
        let (eh, el) = (hi.statistics["estimate"], lo.statistics["estimate"]);
        pass &= eh >= 0.95 && el <= 0.05;
        details.push(format!("q={q}, r={r}: {el:.3}/{eh:.3}"));
    }
    // exact identities of the threshold constants
    let mut ident = 0.0f64;
    for q in [QIndex::Finite(1.2), QIndex::Finite(2.0), QIndex::Finite(5.0), QIndex::Infinite] {
        for r in [ExtReal::Finite(1.5), ExtReal::Finite(2.0), ExtReal::Infinite] {
            let t = intersection_threshold(q, r)?;
            ident = ident.max((t.a_qr - t.c_qr / t.m_qr).abs() / t.a_qr);
        }
    }
    pass &= ident < 1e-12;
    let mut limit_gap = 0.0f64;
    for &r in &[1.5, 2.0, 4.0] {
        let a = intersection_threshold(QIndex::Finite(1.0 + 1e-8), ExtReal::Finite(r))?.a_qr;
        let limit = (1.0 - 1.0 / r).exp()
            / (ln_gamma(1.0 + 1.0 / r) + ln_gamma(r + 1.0) / r + r.ln() / r).exp();
        limit_gap = limit_gap.max((a - limit).abs());
    }
    pass &= limit_gap < 1e-6;
    details.push(format!("identity gap {ident:.2e}, q->1 gap {limit_gap:.2e}"));
    Ok((pass, details.join("; ")))
}

fn criterion_ode(_seed: u64) -> Result<(bool, String)> {
    let c12 = find_critical_slope(1.0, 2.0, (0.5, 4.0), 1e-8)?;
    let c22 = find_critical_slope(2.0, 2.0, (0.25, 4.0), 1e-8)?;
    let c13 = find_critical_slope(1.0, 3.0, (0.5, 8.0), 1e-8)?;
    let g22 = (2.0 / std::f64::consts::PI).sqrt();
    let mut pass = (c12.c_pq - 2.0).abs() < 1e-4 && (c22.c_pq - g22).abs() < 1e-4;
    pass &= (c13.solution.support_radius - 0.5).abs() < 1e-3;
    // sup-norm against the two closed forms
    let d12 = conjecture_density(1.0, 2.0)?;
    let mut sup12 = 0.0f64;
    for k in 0..2000 {
        let x = -1.0 + 2.0 * (k as f64 + 0.5) / 2000.0;
        sup12 = sup12.max((d12.density(x) - (1.0 - x.abs()).max(0.0)).abs());
    }
    let d22 = conjecture_density(2.0, 2.0)?;
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let mut sup22 = 0.0f64;
    for k in 0..2000 {
        let x = -4.0 + 8.0 * (k as f64 + 0.5) / 2000.0;
        sup22 = sup22.max((d22.density(x) - norm * (-x * x / 2.0).exp()).abs());
    }
    pass &= sup12 < 1e-3 && sup22 < 1e-3;
    let res12 = energy_constraint_residual(&c12.solution).abs();
    let res22 = energy_constraint_residual(&c22.solution).abs();
    pass &= res12 < 1e-3 && res22 < 1e-3;
    let mut drift = 0.0f64;
    for &(p, q) in &[(1.0, 2.0), (2.0, 2.0), (1.5, 3.0)] {
        let base = StepControl::default();
        let coarse = find_critical_slope_with(p, q, (0.25, 4.0), 1e-8, base)?;
        let fine = find_critical_slope_with(
            p,
            q,
            (0.25, 4.0),
            1e-8,
            StepControl { tol: base.tol * 0.5, max_step: base.max_step },
        )?;
        drift = drift.max((coarse.c_pq - fine.c_pq).abs());
    }
    pass &= drift < 1e-6;
    Ok((
        pass,
        format!(
            "c_12 {:.6}, c_22 {:.6}, r_13 {:.5}, sup {:.2e}/{:.2e}, residuals {:.2e}/{:.2e}, drift {:.2e}",
            c12.c_pq, c22.c_pq, c13.solution.support_radius, sup12, sup22, res12, res22, drift
        ),
    ))
}

fn criterion_profile(seed: u64) -> Result<(bool, String)> {
    let rep =
        run_order_statistic_profile(QIndex::Finite(3.0), 100_000, 100, RngStreamSpec::new(seed, 700))?;
    let frac = rep.statistics["pass_fraction"];
    Ok((frac >= 0.99, format!("band pass fraction {frac} (need >= 0.99)")))
}

/// Report JSON with the non-deterministic fields (timestamp, wall time)
/// removed; the determinism contract compares these.
pub fn canonical_report_json(report: &crate::experiments::GofReport) -> Result<String> {
    let mut value = serde_json::to_value(report)?;
    if let Some(map) = value.as_object_mut() {
        map.remove("timestamp");
        map.remove("wall_time_seconds");
    }
    Ok(serde_json::to_string_pretty(&value)?)
}

fn criterion_determinism(seed: u64) -> Result<(bool, String)> {
    let spec = RngStreamSpec::new(seed, 800);
    let r1 = run_lln_norm(QIndex::Finite(2.0), ExtReal::Finite(2.0), 2_000, 50, spec)?;
    let r2 = run_lln_norm(QIndex::Finite(2.0), ExtReal::Finite(2.0), 2_000, 50, spec)?;
    let reports_equal = canonical_report_json(&r1)? == canonical_report_json(&r2)?;
    let params = BallParams::lorentz(QIndex::Finite(2.0), 32, Normalization::Unit)?;
    let b1 = sample_exact(params, 100, spec)?;
    let b2 = sample_exact(params, 100, spec)?;
    let mut buf1 = Vec::new();
    let mut buf2 = Vec::new();
    b1.write_binary(&mut buf1)?;
    b2.write_binary(&mut buf2)?;
    let mut csv1 = Vec::new();
    let mut csv2 = Vec::new();
    b1.write_csv(&mut csv1)?;
    b2.write_csv(&mut csv2)?;
    let batches_equal = buf1 == buf2 && csv1 == csv2;
    Ok((
        reports_equal && batches_equal,
        format!("reports byte-identical: {reports_equal}, batch artifacts byte-identical: {batches_equal}"),
    ))
}
