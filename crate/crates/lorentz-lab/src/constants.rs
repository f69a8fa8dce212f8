//! Centering, variance, law-of-large-numbers and threshold constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{ln_gamma, ln_gamma_ratio};
use crate::kappa::KappaTable;
use crate::qindex::{ExtReal, QIndex};

/// Euler-Mascheroni constant, the Gumbel centering shift.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Fluctuation regime of the maximum coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CltRegime {
    /// `1 <= q < 2`: limit is the centered series `Σ (E_j - 1)/κ_q(j)`.
    Series,
    /// `q = 2`: `√(n/log n)` scaling, normal limit with variance `1/4`.
    LogNormal,
    /// `q > 2`: `√n` scaling, normal limit with variance `σ_q^2`.
    Normal,
}

#[derive(Clone, Copy, Debug)]
pub struct CltConstants {
    /// Centering `μ_{q,n} = (1/n) Σ_j n^{1/q} / κ_q(j)`.
    pub mu_qn: f64,
    /// Limit variance for the normal regimes (`1/4` at `q = 2`).
    pub sigma_sq: Option<f64>,
    pub regime: CltRegime,
    /// Scaling factor in front of `(‖X̃‖_∞ - μ_{q,n})`.
    pub scaling: f64,
}

/// Constants of the maximum-coordinate limit theorem for `1 <= q < ∞`.
/// The κ table must have length `n`.
pub fn clt_constants(table: &KappaTable) -> Result<CltConstants> {
    let q = match table.q() {
        QIndex::Infinite => {
            return Err(Error::InfiniteQ("no maximum-norm fluctuation theorem at q = inf".into()))
        }
        QIndex::Finite(q) => q,
    };
    let n = table.len() as f64;
    let mu_qn = n.powf(1.0 / q - 1.0) * table.reciprocal_sum();
    let (regime, sigma_sq, scaling) = if q < 2.0 {
        (CltRegime::Series, None, n.powf(1.0 - 1.0 / q))
    } else if q == 2.0 {
        (CltRegime::LogNormal, Some(0.25), (n / n.ln()).sqrt())
    } else {
        let s2 = 1.0 / (q * (q - 1.0) * (q - 1.0) * (q - 2.0));
        (CltRegime::Normal, Some(s2), n.sqrt())
    };
    Ok(CltConstants { mu_qn, sigma_sq, regime, scaling })
}

/// The limit `m_{q,r}` of `n^{-1/r} ‖X‖_r` on the volume-normalized ball.
pub fn lln_constant(q: QIndex, r: ExtReal) -> Result<f64> {
    validate_qr(q, r)?;
    Ok(match (q, r) {
        (QIndex::Infinite, ExtReal::Infinite) => 0.5,
        (QIndex::Infinite, ExtReal::Finite(r)) => 0.5 * (1.0 / (r + 1.0)).powf(1.0 / r),
        (QIndex::Finite(q), ExtReal::Infinite) => front_factor(q),
        (QIndex::Finite(q), ExtReal::Finite(r)) => {
            front_factor(q) * (moment_log(q, r) / r).exp()
        }
    })
}

/// `(1/(2 e^{1/q})) q/(q-1)`, the common prefactor of `m_{q,r}` for finite `q`.
fn front_factor(q: f64) -> f64 {
    0.5 * (-1.0 / q).exp() * q / (q - 1.0)
}

/// `log [ Γ(r+1) Γ(1+Q) / Γ(r+1+Q) ]` with `Q = q/(q-1)`, evaluated without
/// cancellation even when `q` is close to 1.
fn moment_log(q: f64, r: f64) -> f64 {
    let big_q = q / (q - 1.0);
    ln_gamma(r + 1.0) - ln_gamma_ratio(1.0 + big_q, r)
}

#[derive(Clone, Copy, Debug)]
pub struct ThresholdConstants {
    /// The Schechtman-Schmuckenschläger threshold `A_{q,r}`.
    pub a_qr: f64,
    /// `c_{q,r} = lim 1/(n^{1/r} vol(ℬ_r^n)^{1/n})`.
    pub c_qr: f64,
    /// `m_{q,r}` as in [`lln_constant`]; the identity `A = c/m` holds exactly.
    pub m_qr: f64,
}

/// Threshold constants of the intersection limit, all four finiteness branches.
pub fn intersection_threshold(q: QIndex, r: ExtReal) -> Result<ThresholdConstants> {
    validate_qr(q, r)?;
    let m_qr = lln_constant(q, r)?;
    let c_qr = match r {
        ExtReal::Infinite => 0.5,
        ExtReal::Finite(r) => 0.5 * (-(1.0 + r.ln()) / r - ln_gamma(1.0 + 1.0 / r)).exp(),
    };
    let a_qr = match (q, r) {
        (QIndex::Infinite, ExtReal::Infinite) => 1.0,
        (QIndex::Finite(q), ExtReal::Infinite) => (1.0 / q).exp() * (q - 1.0) / q,
        (QIndex::Infinite, ExtReal::Finite(r)) => {
            (-ln_gamma(1.0 + 1.0 / r) + ((r + 1.0) / (r * std::f64::consts::E)).ln() / r).exp()
        }
        (QIndex::Finite(q), ExtReal::Finite(r)) => {
            let log = 1.0 / q - 1.0 / r + ((q - 1.0) / q).ln()
                - ln_gamma(1.0 + 1.0 / r)
                - r.ln() / r
                - moment_log(q, r) / r;
            log.exp()
        }
    };
    Ok(ThresholdConstants { a_qr, c_qr, m_qr })
}

fn validate_qr(q: QIndex, r: ExtReal) -> Result<()> {
    if let QIndex::Finite(q) = q {
        if q <= 1.0 {
            return Err(Error::InvalidParameter(format!("requires q > 1, got q = {q}")));
        }
    }
    if let ExtReal::Finite(r) = r {
        if r < 1.0 {
            return Err(Error::InvalidParameter(format!("requires r >= 1, got r = {r}")));
        }
    }
    Ok(())
}

/// Error-bound rate `δ_n` of the order-statistic profile approximation.
pub fn profile_delta(q: QIndex, n: usize) -> f64 {
    let nf = n as f64;
    match q {
        QIndex::Finite(q) if q < 2.0 => nf.powf(-(1.0 - 1.0 / q)),
        QIndex::Finite(q) if q == 2.0 => nf.powf(-0.5) * nf.ln(),
        QIndex::Finite(q) => nf.powf(-1.0 / q),
        QIndex::Infinite => 1.0 / nf.ln(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kappa::kappa;

    #[test]
    fn mu_is_one_in_dimension_one() {
        for &qv in &[1.0, 2.0, 5.0] {
            let t = kappa(QIndex::new(qv).unwrap(), 1);
            assert!((clt_constants(&t).unwrap().mu_qn - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn sigma_squared_at_q_three() {
        let t = kappa(QIndex::Finite(3.0), 10);
        let c = clt_constants(&t).unwrap();
        assert_eq!(c.regime, CltRegime::Normal);
        assert!((c.sigma_sq.unwrap() - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn q_two_is_log_normal_regime() {
        let t = kappa(QIndex::Finite(2.0), 10);
        let c = clt_constants(&t).unwrap();
        assert_eq!(c.regime, CltRegime::LogNormal);
        assert_eq!(c.sigma_sq, Some(0.25));
    }

    #[test]
    fn rejects_infinite_q() {
        let t = kappa(QIndex::Infinite, 10);
        assert!(clt_constants(&t).is_err());
    }

    #[test]
    fn lln_known_values() {
        assert_eq!(lln_constant(QIndex::Infinite, ExtReal::Infinite).unwrap(), 0.5);
        let m_inf_1 = lln_constant(QIndex::Infinite, ExtReal::Finite(1.0)).unwrap();
        assert!((m_inf_1 - 0.25).abs() < 1e-15);
        let m22 = lln_constant(QIndex::Finite(2.0), ExtReal::Finite(2.0)).unwrap();
        let expected = (-0.5f64).exp() * (1.0f64 / 6.0).sqrt();
        assert!((m22 - expected).abs() < 1e-12);
        assert!((m22 - 0.247_615_1).abs() < 1e-6);
    }

    #[test]
    fn threshold_known_values() {
        let a = intersection_threshold(QIndex::Infinite, ExtReal::Infinite).unwrap();
        assert_eq!(a.a_qr, 1.0);
        let a2 = intersection_threshold(QIndex::Finite(2.0), ExtReal::Infinite).unwrap();
        assert!((a2.a_qr - 0.5f64.exp() * 0.5).abs() < 1e-12);
        let ainf2 = intersection_threshold(QIndex::Infinite, ExtReal::Finite(2.0)).unwrap();
        let expected = (1.5f64 / std::f64::consts::E).sqrt()
            / (std::f64::consts::PI.sqrt() / 2.0);
        assert!((ainf2.a_qr - expected).abs() < 1e-12);
        assert!((ainf2.a_qr - 0.838_211_2).abs() < 1e-6);
    }

    #[test]
    fn threshold_identity_on_grid() {
        for q in [QIndex::Finite(1.2), QIndex::Finite(2.0), QIndex::Finite(5.0), QIndex::Infinite] {
            for r in [ExtReal::Finite(1.5), ExtReal::Finite(2.0), ExtReal::Finite(8.0), ExtReal::Infinite] {
                let t = intersection_threshold(q, r).unwrap();
                assert!(
                    (t.a_qr - t.c_qr / t.m_qr).abs() <= 1e-12 * t.a_qr,
                    "q={q}, r={r}: A={} c/m={}",
                    t.a_qr,
                    t.c_qr / t.m_qr
                );
            }
        }
    }

    #[test]
    fn threshold_q_to_one_limit() {
        for &r in &[1.5, 2.0, 4.0] {
            let a = intersection_threshold(QIndex::Finite(1.0 + 1e-8), ExtReal::Finite(r))
                .unwrap()
                .a_qr;
            let limit = (1.0 - 1.0 / r).exp()
                / ((ln_gamma(1.0 + 1.0 / r) + ln_gamma(r + 1.0) / r + r.ln() / r).exp());
            assert!((a - limit).abs() < 1e-6, "r={r}: {a} vs {limit}");
        }
    }

    #[test]
    fn profile_delta_branches() {
        assert!((profile_delta(QIndex::Finite(1.5), 1000) - 1000f64.powf(-1.0 / 3.0)).abs() < 1e-15);
        assert!((profile_delta(QIndex::Finite(2.0), 1000) - 1000f64.powf(-0.5) * 1000f64.ln()).abs() < 1e-15);
        assert!((profile_delta(QIndex::Finite(4.0), 1000) - 1000f64.powf(-0.25)).abs() < 1e-15);
        assert!((profile_delta(QIndex::Infinite, 1000) - 1.0 / 1000f64.ln()).abs() < 1e-15);
    }
}
