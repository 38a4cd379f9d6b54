//! Piecewise representations of `ρ_a` and `Ω_a`.
//!
//! Both solve delay equations with kernel built from `a`:
//!
//! * `ρ_a(x) = 1` on `[0, 1]` and `ρ_a(x) = ρ_a(k) - a ∫_k^x ρ_a(t-1) (t-1)^{a-1} t^{-a} dt`;
//! * `Ω_a(x) = 1` on `[1, 2]` and `Ω_a(x) = Ω_a(k) + a ∫_k^x Ω_a(t-1) / (t-1) dt`.
//!
//! On each unit interval `[k, k+1]`, `k ≥ 2`, the function is stored in the
//! variable `s = √(x-k)` as Chebyshev panels on `[0, 1]`. The square-root
//! singularities that appear at every integer when `a = 1/2` are analytic
//! in `s`. Panels are bisected until the trailing coefficients fall below
//! the target, so other exponents get graded panels near `s = 0`.
//! The first interval of `ρ_a` is evaluated by Gauss–Jacobi quadrature.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::quad::{gauss_jacobi, gauss_legendre, ChebPanel, GaussRule};
use crate::error::{Error, Result};

const PANEL_NODES: usize = 32;
const MIN_PANEL: f64 = 1e-9;
const REL_TARGET: f64 = 4e-16;
const DEFAULT_PIECES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DelayKind {
    Rho,
    Omega,
}

#[derive(Debug, Clone)]
struct Piece {
    panels: Vec<ChebPanel>,
    /// Accumulated error bound on this interval.
    err: f64,
}

impl Piece {
    fn eval(&self, s: f64) -> f64 {
        let idx = self
            .panels
            .partition_point(|p| p.hi < s)
            .min(self.panels.len() - 1);
        self.panels[idx].eval(s)
    }
}

/// `ρ_a` or `Ω_a` on `[0, K]` resp. `[1, K]`.
#[derive(Debug, Clone)]
pub struct PiecewiseFunction {
    kind: DelayKind,
    a: f64,
    /// `pieces[i]` covers `[i + 2, i + 3]`.
    pieces: Vec<Piece>,
    first: Arc<GaussRule>,
}

impl PiecewiseFunction {
    pub fn new(kind: DelayKind, a: f64, upto: usize) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("exponent must be positive, got {a}")));
        }
        let mut f = PiecewiseFunction {
            kind,
            a,
            pieces: Vec::new(),
            first: gauss_jacobi(24, 0.0, a - 1.0),
        };
        f.extend_to(upto);
        Ok(f)
    }

    pub fn kind(&self) -> DelayKind {
        self.kind
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Right end of the represented range.
    pub fn upper(&self) -> f64 {
        (self.pieces.len() + 2) as f64
    }

    /// Grows the representation to cover `[.., upto]`.
    pub fn extend_to(&mut self, upto: usize) {
        while self.pieces.len() + 2 < upto {
            let k = self.pieces.len() + 2;
            let p = self.build_piece(k);
            self.pieces.push(p);
        }
    }

    /// `ρ_a(1 + s²)` from `1 - a ∫_0^{s²} v^{a-1} (1+v)^{-a} dv`.
    fn rho_first(&self, s: f64) -> f64 {
        let top = s * s;
        if top == 0.0 {
            return 1.0;
        }
        let a = self.a;
        1.0 - a * self.first.integrate_raw(0.0, top, |v| (1.0 + v).powf(-a))
    }

    /// Value on `[k, k+1]` at `x = k + s²`, `k ≥ 1`.
    fn on_piece(&self, k: usize, s: f64) -> f64 {
        if k == 1 {
            match self.kind {
                DelayKind::Rho => self.rho_first(s),
                DelayKind::Omega => 1.0,
            }
        } else {
            self.pieces[k - 2].eval(s)
        }
    }

    fn piece_err(&self, k: usize) -> f64 {
        if k == 1 {
            4.0 * f64::EPSILON
        } else {
            self.pieces[k - 2].err
        }
    }

    fn build_piece(&self, k: usize) -> Piece {
        let a = self.a;
        let kf = k as f64;
        let kind = self.kind;
        let left = self.on_piece(k - 1, 1.0);
        let g = |u: f64| {
            let t = kf + u * u;
            let kernel = match kind {
                DelayKind::Rho => a * (t - 1.0).powf(a - 1.0) * t.powf(-a),
                DelayKind::Omega => a / (t - 1.0),
            };
            2.0 * u * kernel * self.on_piece(k - 1, u)
        };
        let sign = match kind {
            DelayKind::Rho => -1.0,
            DelayKind::Omega => 1.0,
        };
        let target = (REL_TARGET * left.abs()).max(1e-300);
        let mut panels = Vec::new();
        let mut stack = vec![(0.0f64, 1.0f64)];
        let mut value = left;
        let mut local = 0.0;
        while let Some((lo, hi)) = stack.pop() {
            let p = ChebPanel::fit(lo, hi, PANEL_NODES, g);
            let est = p.tail() * (hi - lo);
            if est > target && hi - lo > MIN_PANEL {
                let mid = 0.5 * (lo + hi);
                stack.push((mid, hi));
                stack.push((lo, mid));
                continue;
            }
            let mut integral = p.integral();
            for c in integral.coeffs.iter_mut() {
                *c *= sign;
            }
            integral.coeffs[0] += value;
            value = integral.eval(hi);
            local += est;
            panels.push(integral);
        }
        let growth = 1.0 + a * (kf / (kf - 1.0)).ln();
        let err = self.piece_err(k - 1) * growth + local + 2.0 * f64::EPSILON * left.abs();
        Piece { panels, err }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        let lo = match self.kind {
            DelayKind::Rho => 0.0,
            DelayKind::Omega => 1.0,
        };
        if !x.is_finite() || x < lo {
            return Err(Error::Domain(format!("argument {x} outside [{lo}, ∞)")));
        }
        if x > self.upper() {
            return Err(Error::Domain(format!(
                "argument {x} beyond represented range {}",
                self.upper()
            )));
        }
        Ok(())
    }

    /// Value and accumulated error bound at `x`.
    pub fn eval_with_err(&self, x: f64) -> Result<(f64, f64)> {
        self.check_domain(x)?;
        match self.kind {
            DelayKind::Rho if x <= 1.0 => return Ok((1.0, 0.0)),
            DelayKind::Omega if x <= 2.0 => return Ok((1.0, 0.0)),
            _ => {}
        }
        let mut k = x.floor() as usize;
        if k as f64 == x && k >= 2 {
            // left end of [k, k+1] equals right end of [k-1, k]
            k -= 1;
            return Ok((self.on_piece(k, 1.0), self.piece_err(k)));
        }
        let s = (x - k as f64).sqrt();
        Ok((self.on_piece(k, s), self.piece_err(k)))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.eval_with_err(x).map(|v| v.0)
    }

    /// `∫_{k0}^{k1} F(x) w(x) dx` over whole unit intervals, `1 ≤ k0 < k1`.
    /// Returns the value and an error bound from the stored accuracies.
    pub fn integrate_weighted<W: Fn(f64) -> f64>(&self, k0: usize, k1: usize, w: W) -> (f64, f64) {
        let rule = gauss_legendre(24);
        let mut total = 0.0;
        let mut err = 0.0;
        for k in k0..k1 {
            let kf = k as f64;
            let f = |s: f64| {
                let x = kf + s * s;
                self.on_piece(k, s) * w(x) * 2.0 * s
            };
            let (piece_sum, mass) = if k == 1 {
                let v = rule.integrate(0.0, 1.0, f);
                let m = rule.integrate(0.0, 1.0, |s| w(kf + s * s).abs() * 2.0 * s);
                (v, m)
            } else {
                let mut v = 0.0;
                let mut m = 0.0;
                for p in &self.pieces[k - 2].panels {
                    v += rule.integrate(p.lo, p.hi, f);
                    m += rule.integrate(p.lo, p.hi, |s| w(kf + s * s).abs() * 2.0 * s);
                }
                (v, m)
            };
            total += piece_sum;
            err += mass * self.piece_err(k) + f64::EPSILON * piece_sum.abs();
        }
        (total, err)
    }
}

type Key = (DelayKind, u64);

fn cache() -> &'static Mutex<HashMap<Key, Arc<PiecewiseFunction>>> {
    static C: OnceLock<Mutex<HashMap<Key, Arc<PiecewiseFunction>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Shared representation covering at least `[.., upto]`.
pub fn piecewise(kind: DelayKind, a: f64, upto: f64) -> Result<Arc<PiecewiseFunction>> {
    let need = (upto.ceil().max(0.0) as usize).max(DEFAULT_PIECES);
    let key = (kind, a.to_bits());
    let mut map = cache().lock().unwrap();
    if let Some(f) = map.get(&key) {
        if f.upper() >= upto {
            return Ok(f.clone());
        }
        let mut grown = (**f).clone();
        grown.extend_to(need);
        let grown = Arc::new(grown);
        map.insert(key, grown.clone());
        return Ok(grown);
    }
    let f = Arc::new(PiecewiseFunction::new(kind, a, need)?);
    map.insert(key, f.clone());
    Ok(f)
}

fn checked(kind: DelayKind, a: f64, x: f64, tol: f64) -> Result<f64> {
    if !(x.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {x}")));
    }
    let f = piecewise(kind, a, x)?;
    let (v, err) = f.eval_with_err(x)?;
    if err > tol {
        return Err(Error::Tolerance {
            requested: tol,
            achieved: err,
        });
    }
    Ok(v)
}

/// `ρ_a(x)` for `x ≥ 0`, with absolute accuracy `tol`.
pub fn dickman_rho(a: f64, x: f64, tol: f64) -> Result<f64> {
    checked(DelayKind::Rho, a, x, tol)
}

/// `Ω_a(x)` for `x ≥ 1`, with absolute accuracy `tol`.
pub fn buchstab_omega(a: f64, x: f64, tol: f64) -> Result<f64> {
    checked(DelayKind::Omega, a, x, tol)
}
