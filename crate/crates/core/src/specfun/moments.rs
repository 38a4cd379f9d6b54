//! Moment integrals of the largest and smallest component, the median
//! limit, and integrals of `ω_A`.

use statrs::function::gamma::{gamma, ln_gamma};

use super::delay::{buchstab_omega, piecewise, DelayKind};
use super::expint::{ein, exp_integral_e, EULER_GAMMA};
use super::quad::{gauss_jacobi, gauss_legendre, QuadratureResult};
use crate::error::{Error, Result};
use crate::family::FamilyId;

/// Last unit interval used for integrals against `ρ_a`; `ρ_a(41)` is far
/// below 1e-40 for the exponents of interest.
const RHO_CUTOFF: usize = 41;
/// Truncation point for integrals of `ω_A`.
const OMEGA_CUTOFF: usize = 60;

fn check_tol(tol: f64) -> Result<()> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

fn check_a(a: f64) -> Result<()> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::Domain(format!("exponent must be positive, got {a}")));
    }
    Ok(())
}

fn finish(value: f64, abs_err: f64, truncation: f64, tol: f64) -> Result<QuadratureResult> {
    if !value.is_finite() || abs_err > tol {
        return Err(Error::Tolerance {
            requested: tol,
            achieved: abs_err,
        });
    }
    Ok(QuadratureResult {
        value,
        abs_err,
        truncation,
    })
}

/// `∫_0^1 x^beta g(x) dx` for smooth `g`, with the difference of two rule
/// sizes as error estimate.
fn weighted_head<G: Fn(f64) -> f64>(beta: f64, g: G) -> (f64, f64) {
    let fine = gauss_jacobi(32, 0.0, beta).integrate_raw(0.0, 1.0, &g);
    let coarse = gauss_jacobi(20, 0.0, beta).integrate_raw(0.0, 1.0, &g);
    (
        fine,
        (fine - coarse).abs() + 4.0 * f64::EPSILON * fine.abs(),
    )
}

/// `∫_0^1 f` on dyadic panels toward 0, for integrands with logarithmic
/// factors. Stops once a panel contributes below `floor`.
fn graded_head<F: Fn(f64) -> f64>(f: F, floor: f64) -> (f64, f64) {
    let fine = gauss_legendre(24);
    let coarse = gauss_legendre(16);
    let mut total = 0.0;
    let mut err = 0.0;
    let mut hi = 1.0f64;
    for _ in 0..1000 {
        let lo = 0.5 * hi;
        let v = fine.integrate(lo, hi, &f);
        err += (v - coarse.integrate(lo, hi, &f)).abs();
        total += v;
        hi = lo;
        if v.abs() < floor {
            // remaining panels shrink at least geometrically
            err += v.abs();
            break;
        }
    }
    (total, err)
}

/// `∫_1^X f` on unit panels.
fn unit_panels<F: Fn(f64) -> f64>(f: F, upper: usize) -> (f64, f64) {
    let fine = gauss_legendre(24);
    let coarse = gauss_legendre(16);
    let mut total = 0.0;
    let mut err = 0.0;
    for k in 1..upper {
        let (lo, hi) = (k as f64, (k + 1) as f64);
        let v = fine.integrate(lo, hi, &f);
        err += (v - coarse.integrate(lo, hi, &f)).abs() + f64::EPSILON * v.abs();
        total += v;
    }
    (total, err)
}

/// Upper bound for `∫_X^∞ x^{h-1} e^{-x} dx`, valid for `X > h - 1`.
fn gamma_tail_bound(h: f64, x: f64) -> f64 {
    x.powf(h - 1.0) * (-x).exp() / (1.0 - (h - 1.0).max(0.0) / x)
}

/// Smallest integer cutoff at which the exponential tail is below `tol/10`.
fn exp_cutoff(h: f64, tol: f64) -> usize {
    let mut x = ((h - 1.0).max(0.0) + 2.0).ceil();
    while gamma_tail_bound(h, x) >= tol / 10.0 && x < 5000.0 {
        x += 1.0;
    }
    x as usize
}

fn check_rank(r: u32, h: f64) -> Result<()> {
    if r == 0 {
        return Err(Error::Domain("rank r must be at least 1".into()));
    }
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::Domain(format!(
            "moment order must be positive, got {h}"
        )));
    }
    Ok(())
}

fn ln_factorial(n: u32) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// `Γ(a+1) a^{r-1} / (Γ(a+h) (r-1)!) ∫_0^∞ x^{h-1} E(x)^{r-1} exp(-a E(x) - x) dx`.
pub fn moment_largest(a: f64, r: u32, h: u32, tol: f64) -> Result<QuadratureResult> {
    check_a(a)?;
    check_tol(tol)?;
    check_rank(r, h as f64)?;
    let hf = h as f64;
    let rm1 = (r - 1) as i32;
    let prefactor =
        (ln_gamma(a + 1.0) + (r as f64 - 1.0) * a.ln() - ln_gamma(a + hf) - ln_factorial(r - 1))
            .exp();
    let e_pow = |x: f64| -> f64 {
        if rm1 == 0 {
            1.0
        } else {
            exp_integral_e(x).map(|e| e.powi(rm1)).unwrap_or(f64::NAN)
        }
    };
    // exp(-aE(x)) = e^{aγ} x^a exp(-a Ein(x)) on (0, 1]
    let (head, head_err) = if r == 1 {
        weighted_head(hf - 1.0 + a, |x| (a * EULER_GAMMA - a * ein(x) - x).exp())
    } else {
        graded_head(
            |x| x.powf(hf - 1.0 + a) * (a * EULER_GAMMA - a * ein(x) - x).exp() * e_pow(x),
            tol * 1e-3 / prefactor,
        )
    };
    let upper = exp_cutoff(hf, tol / prefactor);
    let (body, body_err) = unit_panels(
        |x| x.powf(hf - 1.0) * e_pow(x) * (-a * exp_integral_e(x).unwrap_or(f64::NAN) - x).exp(),
        upper,
    );
    let tail = gamma_tail_bound(hf, upper as f64);
    finish(
        prefactor * (head + body),
        prefactor * (head_err + body_err + tail),
        upper as f64,
        tol,
    )
}

/// `a ∫_0^∞ ρ_a(x) x^{a-1} (x+1)^{-h-a} dx`.
pub fn moment_largest_via_rho(a: f64, h: u32, tol: f64) -> Result<QuadratureResult> {
    check_a(a)?;
    check_tol(tol)?;
    check_rank(1, h as f64)?;
    let hf = h as f64;
    let rho = piecewise(DelayKind::Rho, a, RHO_CUTOFF as f64)?;
    let (head, head_err) = weighted_head(a - 1.0, |x| (1.0 + x).powf(-hf - a));
    let (body, body_err) =
        rho.integrate_weighted(1, RHO_CUTOFF, |x| x.powf(a - 1.0) * (x + 1.0).powf(-hf - a));
    let cut = RHO_CUTOFF as f64;
    let tail = rho.eval(cut)?.abs() * cut.powf(-hf) / hf;
    finish(
        a * (head + body),
        a * (head_err + body_err + tail),
        cut,
        tol,
    )
}

/// `1 - ∫_1^∞ ρ_a(x) x^{-2} dx`, the other side of the mean identity.
pub fn mean_largest_via_rho_tail(a: f64, tol: f64) -> Result<QuadratureResult> {
    check_a(a)?;
    check_tol(tol)?;
    let rho = piecewise(DelayKind::Rho, a, RHO_CUTOFF as f64)?;
    let (body, err) = rho.integrate_weighted(1, RHO_CUTOFF, |x| x.powi(-2));
    let cut = RHO_CUTOFF as f64;
    let tail = rho.eval(cut)?.abs() / cut;
    finish(1.0 - body, err + tail, cut, tol)
}

/// `e^{-hγ} a^{r-1} / r!` when `h = a`, otherwise
/// `Γ(a+1) / (Γ(h) (r-1)!) ∫_0^∞ x^{h-1} exp(a E(x) - x) dx`.
pub fn moment_smallest(a: f64, r: u32, h: f64, tol: f64) -> Result<QuadratureResult> {
    check_a(a)?;
    check_tol(tol)?;
    check_rank(r, h)?;
    if h < a {
        return Err(Error::Domain(format!(
            "moment order {h} below exponent {a}"
        )));
    }
    if h == a {
        let r_fact: f64 = (1..=r).map(f64::from).product();
        let v = (-h * EULER_GAMMA).exp() * a.powi(r as i32 - 1) / r_fact;
        return finish(v, 4.0 * f64::EPSILON * v, f64::INFINITY, tol);
    }
    let prefactor = (ln_gamma(a + 1.0) - ln_gamma(h) - ln_factorial(r - 1)).exp();
    // exp(aE(x)) = e^{-aγ} x^{-a} exp(a Ein(x)) on (0, 1]
    let (head, head_err) =
        weighted_head(h - 1.0 - a, |x| (-a * EULER_GAMMA + a * ein(x) - x).exp());
    let upper = exp_cutoff(h, tol / prefactor);
    let (body, body_err) = unit_panels(
        |x| x.powf(h - 1.0) * (a * exp_integral_e(x).unwrap_or(f64::NAN) - x).exp(),
        upper,
    );
    let tail = gamma_tail_bound(h, upper as f64) * (a * exp_integral_e(upper as f64)?).exp();
    finish(
        prefactor * (head + body),
        prefactor * (head_err + body_err + tail),
        upper as f64,
        tol,
    )
}

/// Limit of median/n for the largest component: the `x` with
/// `∫_x^1 dy/y = 1/2` (a = 1) or `∫_x^1 dy/(2y√(1-y)) = 1/2` (a = 1/2).
pub fn median_limit(a: f64) -> Result<f64> {
    let mass: fn(f64) -> f64 = if a == 1.0 {
        |x| -x.ln()
    } else if a == 0.5 {
        // ∫_x^1 dy/(2y√(1-y)) = artanh(√(1-x))
        |x| (1.0 - x).sqrt().atanh()
    } else {
        return Err(Error::Domain(format!(
            "median limit known only for a = 1 and a = 1/2, got {a}"
        )));
    };
    // mass decreases from ∞ at 0 to 0 at 1
    let (mut lo, mut hi) = (f64::MIN_POSITIVE, 1.0f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if mass(mid) > 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// `ω_A(x) = κ_A Ω_a(x) / x^a`.
pub fn omega_family(family: FamilyId, x: f64) -> Result<f64> {
    if x.is_nan() || x <= 1.0 {
        return Err(Error::Domain(format!("ω_A needs x > 1, got {x}")));
    }
    let spec = family.spec();
    let a = spec.a.value();
    Ok(spec.kappa * buchstab_omega(a, x, 1e-10)? / x.powf(a))
}

/// `∫_2^∞ ω_A(x) x^{-(h+a)} dx`, truncated at 60. Beyond the cutoff
/// `Ω_a(x)` is modeled as `(x - 1 + a)^a (C + D/x²)`, the leading behaviour
/// of the delay equation, with `C` and `D` fitted at `X/2` and `X`; a second
/// fit at `X/3` and `X` bounds the modeling error. Exploratory: not tied to
/// any component statistic.
pub fn omega_moment(family: FamilyId, h: u32, tol: f64) -> Result<QuadratureResult> {
    check_tol(tol)?;
    if h == 0 {
        return Err(Error::Domain("moment order must be at least 1".into()));
    }
    let spec = family.spec();
    let a = spec.a.value();
    let p = h as f64 + a;
    let omega = piecewise(DelayKind::Omega, a, OMEGA_CUTOFF as f64)?;
    let (body, body_err) =
        omega.integrate_weighted(2, OMEGA_CUTOFF, |x| spec.kappa * x.powf(-a - p));
    let cut = OMEGA_CUTOFF as f64;
    let shift = 1.0 - a;
    let level = |x: f64| -> Result<f64> { Ok(omega.eval(x)? / (x - shift).powf(a)) };
    let at_cut = level(cut)?;
    let fit = |x1: f64| -> Result<(f64, f64)> {
        let d = (level(x1)? - at_cut) / (x1.powi(-2) - cut.powi(-2));
        Ok((at_cut - d / (cut * cut), d))
    };
    // ∫_X^∞ (1 - shift/x)^a x^{-p-2j} dx = X^{1-p-2j} ∫_0^1 t^{p-2+2j} (1 - shift t/X)^a dt
    let rule = gauss_jacobi(24, 0.0, p - 2.0);
    let shape0 = rule.integrate_raw(0.0, 1.0, |t| (1.0 - shift * t / cut).powf(a));
    let shape2 = rule.integrate_raw(0.0, 1.0, |t| t * t * (1.0 - shift * t / cut).powf(a));
    let tail = |(c, d): (f64, f64)| {
        spec.kappa * cut.powf(1.0 - p) * (c * shape0 + d / (cut * cut) * shape2)
    };
    let main = tail(fit(cut / 2.0)?);
    let alt = tail(fit(cut / 3.0)?);
    finish(body + main, body_err + (main - alt).abs(), cut, tol)
}

/// `Γ(x)` re-exported for callers combining moments by hand.
pub fn gamma_fn(x: f64) -> f64 {
    gamma(x)
}
