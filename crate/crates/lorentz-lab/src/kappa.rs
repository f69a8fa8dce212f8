//! The weight sums `κ_q(j) = Σ_{i<=j} i^{1/q-1}` (harmonic numbers at `q = ∞`).

use crate::qindex::QIndex;

/// Prefix table of `κ_q(1), ..., κ_q(n)`, accumulated with compensated
/// summation; million-term sums of slowly decaying terms drift under naive
/// accumulation.
#[derive(Clone, Debug)]
pub struct KappaTable {
    q: QIndex,
    values: Vec<f64>,
}

impl KappaTable {
    pub fn q(&self) -> QIndex {
        self.q
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `κ_q(j)`, 1-based.
    pub fn get(&self, j: usize) -> f64 {
        self.values[j - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Σ_j log κ_q(j)`, used by the exact volume product.
    pub fn log_sum(&self) -> f64 {
        let mut sum = 0.0;
        let mut c = 0.0;
        for &v in &self.values {
            let term = v.ln();
            let t = sum + term;
            c += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
            sum = t;
        }
        sum + c
    }

    /// `Σ_{j<=n} 1 / κ_q(j)`.
    pub fn reciprocal_sum(&self) -> f64 {
        kahan_sum(self.values.iter().map(|v| 1.0 / v))
    }

    /// `Σ_{j<=n} 1 / κ_q(j)^2` (the series variance at `q < 2`).
    pub fn reciprocal_square_sum(&self) -> f64 {
        kahan_sum(self.values.iter().map(|v| 1.0 / (v * v)))
    }
}

/// Build the table of prefix sums `κ_q(j)` for `j = 1..=n`.
pub fn kappa(q: QIndex, n: usize) -> KappaTable {
    assert!(n >= 1, "kappa requires n >= 1");
    let e = q.weight_exponent();
    let mut values = Vec::with_capacity(n);
    let mut sum = 0.0;
    let mut c = 0.0; // Kahan carry
    for i in 1..=n {
        let term = (i as f64).powf(e);
        let y = term - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
        values.push(sum);
    }
    KappaTable { q, values }
}

pub fn kahan_sum(it: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for term in it {
        let y = term - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term_is_one() {
        let t = kappa(QIndex::new(7.0).unwrap(), 1);
        assert_eq!(t.get(1), 1.0);
    }

    #[test]
    fn q_one_counts() {
        let t = kappa(QIndex::new(1.0).unwrap(), 5);
        assert_eq!(t.values(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn harmonic_numbers_at_q_inf() {
        let t = kappa(QIndex::infinity(), 3);
        assert!((t.get(3) - 11.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn q_two_prefix() {
        let t = kappa(QIndex::new(2.0).unwrap(), 2);
        assert!((t.get(2) - (1.0 + 2f64.powf(-0.5))).abs() < 1e-15);
    }

    #[test]
    fn strictly_increasing() {
        for q in [QIndex::Finite(1.5), QIndex::Finite(4.0), QIndex::Infinite] {
            let t = kappa(q, 1000);
            for j in 1..t.len() {
                assert!(t.values()[j] > t.values()[j - 1]);
            }
        }
    }

    #[test]
    fn kappa_asymptotics() {
        // κ_q(j) - q j^{1/q} converges to ζ(1-1/q) (≈ -1.46 at q = 2,
        // ≈ -3.44 at q = 4; |ζ(1-1/q)| < q near the pole), so the deviation
        // stays bounded and the tail stabilizes; for q = ∞ the harmonic
        // numbers stay within 1 of log(j+1).
        for &qv in &[1.5, 2.0, 4.0] {
            let q = QIndex::new(qv).unwrap();
            let t = kappa(q, 1_000_000);
            let diff = |j: usize| t.get(j) - qv * (j as f64).powf(1.0 / qv);
            let mut sup = 0.0f64;
            for j in 1..=t.len() {
                sup = sup.max(diff(j).abs());
            }
            assert!(sup < 2.0 * qv, "q={qv}: sup {sup}");
            assert!((diff(1_000_000) - diff(500_000)).abs() < 0.01, "q={qv}");
        }
        let t = kappa(QIndex::infinity(), 1_000_000);
        for j in 1..=t.len() {
            assert!((t.get(j) - ((j + 1) as f64).ln()).abs() <= 1.0);
        }
    }

    #[test]
    fn power_sum_error_constant_is_stable() {
        // |Σ_{i<=n} i^α - n^{α+1}/(α+1)| <= C n^{max(0,α)} with C stable in n.
        for &alpha in &[-0.5, 0.5, 1.5] {
            let mut constants = Vec::new();
            for &n in &[100usize, 1_000, 10_000] {
                let sum = kahan_sum((1..=n).map(|i| (i as f64).powf(alpha)));
                let err = (sum - (n as f64).powf(alpha + 1.0) / (alpha + 1.0)).abs();
                constants.push(err / (n as f64).powf(alpha.max(0.0)));
            }
            let max = constants.iter().cloned().fold(f64::MIN, f64::max);
            let min = constants.iter().cloned().fold(f64::MAX, f64::min);
            assert!(max < 2.0, "alpha={alpha}: C={max}");
            assert!(max / min < 3.0, "alpha={alpha}: constants {constants:?}");
        }
    }
}
