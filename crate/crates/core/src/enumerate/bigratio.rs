//! Conversions from exact integer ratios to floating point.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

/// `x * 2^e` without intermediate overflow or premature underflow.
pub(crate) fn scale_pow2(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// `num / den`, correctly rounded.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "ratio with zero denominator");
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 66;
    let (q, r) = if shift >= 0 {
        (num << shift as u64).div_rem(den)
    } else {
        num.div_rem(&(den << (-shift) as u64))
    };
    // Sticky bit: the quotient has at least 66 bits, so a nonzero remainder
    // only matters for breaking what would otherwise look like an exact tie.
    let q = if r.is_zero() {
        q
    } else {
        q | BigUint::from(1u32)
    };
    let qf = q.to_f64().expect("quotient fits in f64");
    scale_pow2(qf, -shift)
}

pub fn signed_ratio_to_f64(num: &BigInt, den: &BigUint) -> f64 {
    let mag = ratio_to_f64(num.magnitude(), den);
    if num.sign() == Sign::Minus {
        -mag
    } else {
        mag
    }
}
