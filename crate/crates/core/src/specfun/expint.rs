//! Exponential integral `E(x) = ∫_x^∞ e^{-t}/t dt`.

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Entire part `Ein(x) = Σ_{k≥1} (-1)^{k+1} x^k / (k·k!)`, so that
/// `E(x) = -γ - ln x + Ein(x)`. Intended for `|x| ≲ 4`.
pub fn ein(x: f64) -> f64 {
    let mut term = x; // x^k / k!
    let mut sum = x;
    let mut k = 1.0;
    loop {
        k += 1.0;
        term *= -x / k;
        let add = term / k;
        sum += add;
        if add.abs() <= 1e-18 * sum.abs() {
            return sum;
        }
    }
}

/// `E(x)` for `x > 0`: series up to 1, continued fraction up to 40,
/// asymptotic expansion beyond.
pub fn exp_integral_e(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("E(x) needs finite x > 0, got {x}")));
    }
    Ok(if x <= 1.0 {
        -EULER_GAMMA - x.ln() + ein(x)
    } else if x <= 40.0 {
        continued_fraction(x)
    } else {
        asymptotic(x)
    })
}

/// `e^{-x} / (x+1 - 1²/(x+3 - 2²/(x+5 - ...)))`, evaluated from the tail.
fn continued_fraction(x: f64) -> f64 {
    // 160 levels reach full precision for x just above 1.
    let mut t = 0.0;
    for i in (1..=160u32).rev() {
        let i = i as f64;
        t = i * i / (x + 2.0 * i + 1.0 - t);
    }
    (-x).exp() / (x + 1.0 - t)
}

fn asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        let next = -term * k / x;
        if next.abs() >= term.abs() || next.abs() < 1e-17 {
            break;
        }
        term = next;
        sum += term;
        k += 1.0;
    }
    (-x).exp() / x * sum
}
