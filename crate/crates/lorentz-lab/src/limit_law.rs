//! The limiting coordinate law `ν_{q,1}` in closed form.
//!
//! For finite `q > 1` the density is `f(x) = (q/2)(1-(q-1)|x|)^{1/(q-1)}` on
//! `[-1/(q-1), 1/(q-1)]`; at `q = ∞` it is uniform on `[-1, 1]`.

use crate::error::{Error, Result};
use crate::qindex::QIndex;

#[derive(Clone, Copy, Debug)]
pub struct LimitLaw {
    q: QIndex,
    support: f64,
}

/// Closed-form density/CDF/quantile of `ν_{q,1}`. Rejects `q = 1`, where the
/// family degenerates to the two-sided exponential.
pub fn limit_law(q: QIndex) -> Result<LimitLaw> {
    match q {
        QIndex::Finite(qv) if qv <= 1.0 => Err(Error::DegenerateQ(
            "the limit law is stated for q > 1; the q -> 1 limit is two-sided exponential".into(),
        )),
        QIndex::Finite(qv) => Ok(LimitLaw { q, support: 1.0 / (qv - 1.0) }),
        QIndex::Infinite => Ok(LimitLaw { q, support: 1.0 }),
    }
}

impl LimitLaw {
    pub fn q(&self) -> QIndex {
        self.q
    }

    /// Half-width of the support interval: `1/(q-1)` for finite `q`, `1` at `q = ∞`.
    pub fn support_radius(&self) -> f64 {
        self.support
    }

    pub fn density(&self, x: f64) -> f64 {
        if x.abs() > self.support {
            return 0.0;
        }
        match self.q {
            QIndex::Finite(q) => 0.5 * q * (1.0 - (q - 1.0) * x.abs()).powf(1.0 / (q - 1.0)),
            QIndex::Infinite => 0.5,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= -self.support {
            return 0.0;
        }
        if x >= self.support {
            return 1.0;
        }
        match self.q {
            QIndex::Finite(q) => {
                if x >= 0.0 {
                    1.0 - 0.5 * (1.0 - (q - 1.0) * x).powf(q / (q - 1.0))
                } else {
                    0.5 * (1.0 + (q - 1.0) * x).powf(q / (q - 1.0))
                }
            }
            QIndex::Infinite => 0.5 * (x + 1.0),
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        assert!((0.0..=1.0).contains(&u), "quantile requires u in [0,1]");
        match self.q {
            QIndex::Finite(q) => {
                if u >= 0.5 {
                    (1.0 - (2.0 * (1.0 - u)).powf((q - 1.0) / q)) / (q - 1.0)
                } else {
                    -(1.0 - (2.0 * u).powf((q - 1.0) / q)) / (q - 1.0)
                }
            }
            QIndex::Infinite => 2.0 * u - 1.0,
        }
    }
}

/// The limiting order-statistic profile `G_q` of Lemma-type approximations:
/// `G_q(t) = (1 - t^{1-1/q})/(q-1)` for finite `q`, `1 - t` at `q = ∞`.
pub fn g_profile(q: QIndex, t: f64) -> f64 {
    assert!((0.0..=1.0).contains(&t), "g_profile requires t in [0,1]");
    match q {
        QIndex::Finite(qv) => (1.0 - t.powf(1.0 - 1.0 / qv)) / (qv - 1.0),
        QIndex::Infinite => 1.0 - t,
    }
}
