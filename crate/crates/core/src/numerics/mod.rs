//! Exact integer and rational arithmetic, plus a log-domain real type.
//!
//! Integers and rationals come from `num-bigint` / `num-rational`; this module
//! adds the fixed-size linear algebra and log-domain helpers the rest of the
//! crate is written against.

pub mod linalg;
pub mod logreal;
pub mod scan;

use std::cmp::Ordering;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

pub use linalg::{Matrix5, Scalar, Vector5, DIM};
pub use logreal::{ln_bigint, log_sum, log_sum_nonnegative, ratio_to_f64, LogReal};

/// Exact comparison by cross-multiplication (denominators are positive).
pub fn big_rational_cmp(a: &BigRational, b: &BigRational) -> Ordering {
    (a.numer() * b.denom()).cmp(&(b.numer() * a.denom()))
}

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn ratio_from_int(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{Signed, Zero};
    use proptest::prelude::*;

    #[test]
    fn cmp_examples() {
        assert_eq!(big_rational_cmp(&ratio(1, 3), &ratio(1, 3)), Ordering::Equal);
        assert_eq!(big_rational_cmp(&ratio(9, 50), &ratio(10, 50)), Ordering::Less);
        // (2·5 − 1)/(2·25) against 1/5: 9·5 = 45 < 50 = 50·1
        assert_eq!(
            big_rational_cmp(&ratio(2 * 5 - 1, 2 * 25), &ratio(1, 5)),
            Ordering::Less
        );
    }

    #[test]
    fn rationals_are_reduced() {
        let q = ratio(10, -50);
        assert_eq!(q.numer(), &int(-1));
        assert_eq!(q.denom(), &int(5));
    }

    /// floor(q · 10^digits), an independent decimal-expansion oracle.
    fn decimal_expansion(q: &BigRational, digits: u32) -> BigInt {
        let scaled = q * ratio_from_int(&BigInt::from(10).pow(digits));
        scaled.floor().to_integer()
    }

    proptest! {
        #[test]
        fn cmp_agrees_with_decimal_expansion(
            a in -10_000i64..10_000, b in 1i64..10_000,
            c in -10_000i64..10_000, d in 1i64..10_000,
        ) {
            let x = ratio(a, b);
            let y = ratio(c, d);
            let by_digits = decimal_expansion(&x, 200).cmp(&decimal_expansion(&y, 200));
            prop_assert_eq!(big_rational_cmp(&x, &y), by_digits);
        }

        #[test]
        fn bigint_mul_assoc_comm(a in any::<i128>(), b in any::<i128>(), c in any::<i128>()) {
            let (a, b, c) = (BigInt::from(a), BigInt::from(b), BigInt::from(c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn exp_log_round_trip(x in 1e-300f64..1e300) {
            let back = LogReal::from_value(x).value();
            prop_assert!(((back - x) / x).abs() < 1e-12);
        }
    }

    #[test]
    fn products_of_large_factors_are_exact() {
        // 100 factors of size ~10^20: the product divided back down is exact.
        let factors: Vec<BigInt> = (0..100)
            .map(|i| BigInt::from(10u64).pow(20) + BigInt::from(i))
            .collect();
        let p = factors.iter().fold(BigInt::from(1), |acc, f| acc * f);
        let back = factors.iter().fold(p, |acc, f| {
            assert!((&acc % f).is_zero());
            acc / f
        });
        assert_eq!(back, BigInt::from(1));
        assert!(!back.is_negative());
    }
}
