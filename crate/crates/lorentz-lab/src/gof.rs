//! Kolmogorov-Smirnov tests against closed-form or empirical references.

use crate::constants::EULER_GAMMA;
use crate::error::{Error, Result};
use crate::limit_law::LimitLaw;

/// A reference law to test samples against.
#[derive(Clone, Debug)]
pub enum ComparisonLaw {
    /// The compactly supported limit law `ν_{q,1}`.
    NuQ1(LimitLaw),
    Gaussian { mean: f64, variance: f64 },
    /// Gumbel with location `shift`: `cdf(x) = exp(-exp(-(x - shift)))`.
    Gumbel { shift: f64 },
    /// Two-sided exponential with density `exp(-|x|)/2`.
    TwoSidedExponential,
    /// Empirical reference sample (kept sorted).
    Empirical(Vec<f64>),
}

impl ComparisonLaw {
    /// Gumbel centered at `-γ`, the `q = 1` maximum-coordinate limit.
    pub fn gumbel_minus_gamma() -> Self {
        ComparisonLaw::Gumbel { shift: -EULER_GAMMA }
    }

    pub fn empirical(mut sample: Vec<f64>) -> Self {
        sample.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        ComparisonLaw::Empirical(sample)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            ComparisonLaw::NuQ1(law) => law.cdf(x),
            ComparisonLaw::Gaussian { mean, variance } => {
                normal_cdf((x - mean) / variance.sqrt())
            }
            ComparisonLaw::Gumbel { shift } => (-(-(x - shift)).exp()).exp(),
            ComparisonLaw::TwoSidedExponential => {
                if x < 0.0 {
                    0.5 * x.exp()
                } else {
                    1.0 - 0.5 * (-x).exp()
                }
            }
            ComparisonLaw::Empirical(sorted) => {
                let idx = sorted.partition_point(|&v| v <= x);
                idx as f64 / sorted.len() as f64
            }
        }
    }

    /// Quantile by closed form where available, bisection on the CDF otherwise.
    pub fn quantile(&self, u: f64) -> f64 {
        assert!((0.0..1.0).contains(&u) || u == 0.0, "u in [0,1) required");
        match self {
            ComparisonLaw::NuQ1(law) => law.quantile(u),
            ComparisonLaw::Gumbel { shift } => shift - (-u.ln()).ln(),
            ComparisonLaw::TwoSidedExponential => {
                if u < 0.5 {
                    (2.0 * u).ln()
                } else {
                    -(2.0 * (1.0 - u)).ln()
                }
            }
            ComparisonLaw::Empirical(sorted) => {
                let idx = ((u * sorted.len() as f64) as usize).min(sorted.len() - 1);
                sorted[idx]
            }
            ComparisonLaw::Gaussian { .. } => {
                let (mut lo, mut hi) = (-40.0, 40.0);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }
}

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc_approx(-z / std::f64::consts::SQRT_2)
}

/// Complementary error function (Numerical-Recipes-style rational Chebyshev
/// fit, absolute error below 1.2e-7; ample for KS distances).
fn erfc_approx(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587
                                        + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{k>=1} (-1)^{k-1} exp(-2 k² λ²)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample KS test of `data` against `law`; `data` need not be sorted.
pub fn ks_one_sample(data: &[f64], law: &ComparisonLaw) -> Result<KsResult> {
    if data.is_empty() {
        return Err(Error::InvalidParameter("KS test requires non-empty data".into()));
    }
    if let Some(idx) = data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteData(idx));
    }
    let mut xs = data.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut stat = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let c = law.cdf(x);
        stat = stat.max((c - i as f64 / n).abs());
        stat = stat.max(((i + 1) as f64 / n - c).abs());
    }
    let p_value = kolmogorov_sf(n.sqrt() * stat);
    Ok(KsResult { statistic: stat, p_value })
}

/// Two-sample KS test; the p-value uses the asymptotic Kolmogorov law with
/// effective size `n m / (n + m)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("KS test requires non-empty data".into()));
    }
    for (idx, v) in a.iter().chain(b).enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFiniteData(idx));
        }
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_unstable_by(|u, v| u.partial_cmp(v).unwrap());
    ys.sort_unstable_by(|u, v| u.partial_cmp(v).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut stat = 0.0f64;
    while i < n && j < m {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        stat = stat.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let eff = (n as f64 * m as f64) / ((n + m) as f64);
    Ok(KsResult { statistic: stat, p_value: kolmogorov_sf(eff.sqrt() * stat) })
}
