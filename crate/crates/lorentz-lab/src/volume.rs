//! Exact and asymptotic volumes.
//!
//! The Lorentz ball volume is the finite product `2^n Π_j κ_q(j)^{-1}`, which
//! underflows double precision near n ≈ 10^3, so everything is carried in log
//! space and linear values are materialized only when representable.

use crate::gamma::ln_gamma;
use crate::kappa::{kappa, KappaTable};
use crate::qindex::{ExtReal, QIndex};

/// Volume of `ℬ_{q,1}^n` as a log value plus the linear value when it is
/// representable in `f64`.
#[derive(Clone, Copy, Debug)]
pub struct BallVolume {
    pub log_volume: f64,
    /// `exp(log_volume)` or `None` on overflow/underflow.
    pub volume: Option<f64>,
}

impl BallVolume {
    fn from_log(log_volume: f64) -> Self {
        let v = log_volume.exp();
        let volume = if v.is_finite() && v > 0.0 { Some(v) } else { None };
        BallVolume { log_volume, volume }
    }

    /// The volume radius `vol^{1/n}`.
    pub fn radius(&self, n: usize) -> f64 {
        (self.log_volume / n as f64).exp()
    }
}

/// `vol_n(ℬ_{q,1}^n) = 2^n Π_{j<=n} κ_q(j)^{-1}`.
pub fn ball_volume(q: QIndex, n: usize) -> BallVolume {
    ball_volume_from_table(&kappa(q, n))
}

/// Volume from a precomputed κ table of length `n`.
pub fn ball_volume_from_table(table: &KappaTable) -> BallVolume {
    let n = table.len() as f64;
    BallVolume::from_log(n * 2f64.ln() - table.log_sum())
}

/// Right-hand side of the volume-radius asymptotics:
/// `(2/q) e^{1/q} n^{-1/q}` for finite `q`, `2 / log n` at `q = ∞`.
pub fn volume_radius_asymptotic(q: QIndex, n: usize) -> f64 {
    match q {
        QIndex::Finite(q) => 2.0 / q * (1.0 / q).exp() * (n as f64).powf(-1.0 / q),
        QIndex::Infinite => 2.0 / (n as f64).ln(),
    }
}

/// Exact `vol_n(ℬ_r^n)^{1/n} = 2 Γ(1 + 1/r) / Γ(1 + n/r)^{1/n}` (`2` at `r = ∞`).
pub fn lr_ball_volume_radius(r: ExtReal, n: usize) -> f64 {
    assert!(n >= 1);
    match r {
        ExtReal::Infinite => 2.0,
        ExtReal::Finite(r) => {
            let log = 2f64.ln() + ln_gamma(1.0 + 1.0 / r) - ln_gamma(1.0 + n as f64 / r) / n as f64;
            log.exp()
        }
    }
}
