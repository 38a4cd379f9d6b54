//! Double-double arithmetic (an unevaluated sum `hi + lo` of two `f64`s).
//!
//! Only what the log-space weights and compensated sums need: add, subtract,
//! scale, and a natural logarithm good to roughly 1e-30 relative.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigUint;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    // ln 2 to ~107 bits.
    pub const LN_2: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };

    #[inline]
    pub const fn new(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DoubleDouble { hi, lo }
    }

    #[inline]
    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let r = ((self.hi - p) - e + self.lo) / b;
        let (hi, lo) = quick_two_sum(q1, r);
        DoubleDouble { hi, lo }
    }

    fn mul_dd(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    fn div_dd(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o.mul_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o.mul_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::new(q3)
    }

    /// Natural log of a positive double-double.
    pub fn ln(self) -> Self {
        assert!(self.hi > 0.0, "ln of non-positive value");
        // Split off the binary exponent: x = m 2^e with m in [1/√2, √2).
        let (mut m, mut e) = frexp(self.hi);
        let mut scaled = DoubleDouble {
            hi: m,
            lo: ldexp(self.lo, -e),
        };
        if m < std::f64::consts::FRAC_1_SQRT_2 {
            m *= 2.0;
            e -= 1;
            scaled = scaled.mul_f64(2.0);
        }
        let _ = m;
        // ln m = 2 atanh(z), z = (m - 1)/(m + 1), |z| <= 0.1716.
        let one = DoubleDouble::new(1.0);
        let z = (scaled - one) / (scaled + one);
        let z2 = z * z;
        let mut term = z;
        let mut sum = z;
        let mut k = 1.0;
        loop {
            term = term * z2;
            k += 2.0;
            let add = term.div_f64(k);
            sum += add;
            if add.hi == 0.0 || add.hi.abs() < 1e-34 * sum.hi.abs() {
                break;
            }
        }
        sum.mul_f64(2.0) + DoubleDouble::LN_2.mul_f64(e as f64)
    }

    /// `ln` of an arbitrary-size positive integer.
    pub fn ln_biguint(x: &BigUint) -> Self {
        let bits = x.bits();
        assert!(bits > 0, "ln of zero");
        if bits <= 106 {
            return Self::from_biguint_small(x).ln();
        }
        let shift = bits - 106;
        let top = x >> shift;
        Self::from_biguint_small(&top).ln() + DoubleDouble::LN_2.mul_f64(shift as f64)
    }

    fn from_biguint_small(x: &BigUint) -> Self {
        // x < 2^106
        let digits = x.to_u64_digits();
        let lo_word = digits.first().copied().unwrap_or(0);
        let hi_word = digits.get(1).copied().unwrap_or(0);
        let hi_part = hi_word as f64 * 18_446_744_073_709_551_616.0;
        // hi_word < 2^42, so hi_part is exact; lo_word splits into two exact halves.
        let a = DoubleDouble::new(hi_part);
        let b = DoubleDouble::new((lo_word >> 32) as f64 * 4_294_967_296.0);
        let c = DoubleDouble::new((lo_word & 0xffff_ffff) as f64);
        a + b + c
    }
}

fn frexp(x: f64) -> (f64, i32) {
    // x > 0, normal
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let e = exp - 1022;
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    // m in [0.5, 1); normalize to [1, 2)
    (m * 2.0, e - 1)
}

fn ldexp(x: f64, e: i32) -> f64 {
    x * 2f64.powi(e)
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }
}

impl AddAssign for DoubleDouble {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul<f64> for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: f64) -> Self {
        self.mul_f64(b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        self.mul_dd(o)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        self.div_dd(o)
    }
}

/// Running sum of `f64` values carried in double-double.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum(DoubleDouble);

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.0.hi, x);
        let (hi, lo) = quick_two_sum(s, e + self.0.lo);
        self.0 = DoubleDouble { hi, lo };
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.0.to_f64()
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}
