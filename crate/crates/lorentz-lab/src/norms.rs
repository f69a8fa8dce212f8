//! Lorentz and `ℓ_r` norms.

use crate::qindex::{ExtReal, QIndex};

/// The Lorentz norm `Σ_i i^{1/q-1} x_i^*` where `x^*` is the non-increasing
/// rearrangement of the absolute values.
pub fn lorentz_norm(x: &[f64], q: QIndex) -> f64 {
    let mut abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    abs.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    lorentz_norm_sorted(&abs, q)
}

/// Same as [`lorentz_norm`] for input already sorted non-increasing and
/// nonnegative.
pub fn lorentz_norm_sorted(sorted_abs: &[f64], q: QIndex) -> f64 {
    let e = q.weight_exponent();
    let mut sum = 0.0;
    let mut c = 0.0;
    for (i, &v) in sorted_abs.iter().enumerate() {
        let term = ((i + 1) as f64).powf(e) * v;
        let y = term - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// The `ℓ_r` norm `(Σ |x_i|^r)^{1/r}`, maximum at `r = ∞`.
pub fn lr_norm(x: &[f64], r: ExtReal) -> f64 {
    match r {
        ExtReal::Infinite => x.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        ExtReal::Finite(r) => {
            // rescale by the max to avoid overflow of |x_i|^r
            let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if max == 0.0 {
                return 0.0;
            }
            let sum: f64 = x.iter().map(|v| (v.abs() / max).powf(r)).sum();
            max * sum.powf(1.0 / r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_vector() {
        assert_eq!(lorentz_norm(&[0.0; 4], QIndex::Finite(3.0)), 0.0);
    }

    #[test]
    fn unit_coordinate_vector() {
        for q in [QIndex::Finite(1.0), QIndex::Finite(2.5), QIndex::Infinite] {
            assert_eq!(lorentz_norm(&[0.0, 1.0, 0.0], q), 1.0);
        }
    }

    #[test]
    fn two_ones_q_two() {
        let v = lorentz_norm(&[1.0, 1.0], QIndex::Finite(2.0));
        assert!((v - (1.0 + 2f64.powf(-0.5))).abs() < 1e-15);
    }

    #[test]
    fn lr_values() {
        assert!((lr_norm(&[3.0, 4.0], ExtReal::Finite(2.0)) - 5.0).abs() < 1e-12);
        assert_eq!(lr_norm(&[1.0, -2.0, 0.0], ExtReal::Infinite), 2.0);
        assert!((lr_norm(&[1.0, 1.0, 1.0], ExtReal::Finite(3.0)) - 3f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn permutation_and_sign_invariant(
            mut x in proptest::collection::vec(-10.0f64..10.0, 1..12),
            seed in any::<u64>(),
            qv in 1.0f64..8.0,
        ) {
            let q = QIndex::new(qv).unwrap();
            let base = lorentz_norm(&x, q);
            // deterministic scramble from the seed
            let mut s = seed;
            for i in (1..x.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                let j = (s >> 33) as usize % (i + 1);
                x.swap(i, j);
                if s & 1 == 1 {
                    x[i] = -x[i];
                }
            }
            prop_assert_eq!(lorentz_norm(&x, q), base);
        }

        #[test]
        fn norm_axioms(
            x in proptest::collection::vec(-10.0f64..10.0, 4),
            y in proptest::collection::vec(-10.0f64..10.0, 4),
            lambda in -5.0f64..5.0,
            qv in 1.0f64..8.0,
        ) {
            let q = QIndex::new(qv).unwrap();
            let nx = lorentz_norm(&x, q);
            let ny = lorentz_norm(&y, q);
            prop_assert!(nx >= 0.0);
            let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
            prop_assert!((lorentz_norm(&scaled, q) - lambda.abs() * nx).abs() < 1e-12 * (1.0 + nx));
            let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            prop_assert!(lorentz_norm(&sum, q) <= nx + ny + 1e-12);
        }
    }
}
