//! Locale-independent number formatting.
//!
//! Rust's float formatting rounds the exact binary value half-to-even, so the
//! output is a pure function of the bits.

/// `v` with `digits` significant digits. Plain decimal notation for
/// `1e-5 <= |v| < 10^digits`, scientific otherwise.
pub fn sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    }
}

/// Default precision for floating output.
pub fn full(v: f64) -> String {
    sig(v, 17)
}

pub fn fixed(v: f64, decimals: usize) -> String {
    format!("{v:.decimals$}")
}
