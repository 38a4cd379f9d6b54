//! Gauss rules and Chebyshev panels.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;
use statrs::function::gamma::gamma;

/// Value of an integral with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Estimated absolute error, including any truncated tail.
    pub abs_err: f64,
    /// Upper limit actually used for an improper integral (`f64::INFINITY`
    /// when nothing was truncated).
    pub truncation: f64,
}

impl QuadratureResult {
    pub fn scale(self, factor: f64) -> Self {
        QuadratureResult {
            value: self.value * factor,
            abs_err: self.abs_err * factor.abs(),
            truncation: self.truncation,
        }
    }
}

/// Nodes and weights on `[-1, 1]` for the weight `(1-x)^alpha (1+x)^beta`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
}

impl GaussRule {
    /// `∫_lo^hi f(x) dx` with the rule's weight mapped onto `[lo, hi]`, i.e.
    /// `∫ ((hi-x)/h)^alpha ((x-lo)/h)^beta f(x) dx` with `h = (hi-lo)/2`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }

    /// `∫_lo^hi (hi-x)^alpha (x-lo)^beta f(x) dx`.
    pub fn integrate_raw<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
        let half = 0.5 * (hi - lo);
        self.integrate(lo, hi, f) * half.powf(self.alpha + self.beta)
    }
}

type RuleKey = (usize, u64, u64);

fn rule_cache() -> &'static Mutex<HashMap<RuleKey, Arc<GaussRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Gauss–Legendre rule with `n` nodes (cached).
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    gauss_jacobi(n, 0.0, 0.0)
}

/// Gauss–Jacobi rule with `n` nodes for `(1-x)^alpha (1+x)^beta`, `alpha, beta > -1`
/// (cached). Nodes start from the Golub–Welsch eigenvalues and are polished
/// by Newton steps on the three-term recurrence; weights come from the
/// closed form in `P_n'`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Arc<GaussRule> {
    assert!(
        n >= 1 && alpha > -1.0 && beta > -1.0,
        "invalid Gauss–Jacobi parameters"
    );
    let key = (n, alpha.to_bits(), beta.to_bits());
    if let Some(r) = rule_cache().lock().unwrap().get(&key) {
        return r.clone();
    }
    let rule = Arc::new(build_jacobi(n, alpha, beta));
    rule_cache().lock().unwrap().insert(key, rule.clone());
    rule
}

/// `(P_n, P_{n-1})` of the Jacobi family at `x`.
fn jacobi_pair(n: usize, alpha: f64, beta: f64, x: f64) -> (f64, f64) {
    let ab = alpha + beta;
    let mut p0 = 1.0;
    let mut p1 = 0.5 * (alpha - beta + (ab + 2.0) * x);
    if n == 0 {
        return (p0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let c = 2.0 * k + ab;
        let a1 = 2.0 * k * (k + ab) * (c - 2.0);
        let a2 = (c - 1.0) * (alpha * alpha - beta * beta);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c;
        let p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// `P_n'(x)` from `P_n` and `P_{n-1}`.
fn jacobi_derivative(n: usize, alpha: f64, beta: f64, x: f64, pn: f64, pn1: f64) -> f64 {
    let nf = n as f64;
    let c = 2.0 * nf + alpha + beta;
    (nf * (alpha - beta - c * x) * pn + 2.0 * (nf + alpha) * (nf + beta) * pn1)
        / (c * (1.0 - x * x))
}

fn build_jacobi(n: usize, alpha: f64, beta: f64) -> GaussRule {
    let ab = alpha + beta;
    // Symmetric tridiagonal Jacobi matrix.
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for (k, d) in diag.iter_mut().enumerate() {
        let kf = k as f64;
        let c = 2.0 * kf + ab;
        *d = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / (c * (c + 2.0))
        };
    }
    #[allow(clippy::needless_range_loop)]
    for k in 1..n {
        let kf = k as f64;
        let c = 2.0 * kf + ab;
        let num = 4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab);
        let den = c * c * (c + 1.0) * (c - 1.0);
        off[k] = (num / den).sqrt();
    }
    let mut nodes = tridiagonal_eigenvalues(diag, off);
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Weights up to a common factor, normalized to the exact zeroth moment.
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (pn, pn1) = jacobi_pair(n, alpha, beta, *x);
            let d = jacobi_derivative(n, alpha, beta, *x, pn, pn1);
            let step = pn / d;
            *x -= step;
            if step.abs() < 1e-17 {
                break;
            }
        }
        let (pn, pn1) = jacobi_pair(n, alpha, beta, *x);
        let d = jacobi_derivative(n, alpha, beta, *x, pn, pn1);
        weights.push(1.0 / ((1.0 - *x * *x) * d * d));
    }
    let total: f64 = weights.iter().sum();
    let moment = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(ab + 2.0);
    for w in weights.iter_mut() {
        *w *= moment / total;
    }
    GaussRule {
        nodes,
        weights,
        alpha,
        beta,
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix (`off[0]` unused) by the
/// implicit QL method.
fn tridiagonal_eigenvalues(mut d: Vec<f64>, mut e: Vec<f64>) -> Vec<f64> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    if n > 0 {
        e[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 100, "tridiagonal QL did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d
}

/// Chebyshev series `Σ a_m T_m(y)` on a panel `[lo, hi]`, `y = (2x - lo - hi)/(hi - lo)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebPanel {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl ChebPanel {
    /// Interpolates `f` at `n` Chebyshev points of the first kind.
    pub fn fit<F: FnMut(f64) -> f64>(lo: f64, hi: f64, n: usize, mut f: F) -> Self {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let nf = n as f64;
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let y = (std::f64::consts::PI * (j as f64 + 0.5) / nf).cos();
                f(mid + half * y)
            })
            .collect();
        let coeffs = (0..n)
            .map(|m| {
                let s: f64 = samples
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        v * (std::f64::consts::PI * m as f64 * (j as f64 + 0.5) / nf).cos()
                    })
                    .sum();
                if m == 0 {
                    s / nf
                } else {
                    2.0 * s / nf
                }
            })
            .collect();
        ChebPanel { lo, hi, coeffs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let y = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        clenshaw(&self.coeffs, y)
    }

    /// Size of the trailing coefficients, a proxy for the interpolation error.
    pub fn tail(&self) -> f64 {
        let n = self.coeffs.len();
        self.coeffs[n.saturating_sub(3)..]
            .iter()
            .map(|c| c.abs())
            .sum()
    }

    /// Antiderivative vanishing at `lo`.
    pub fn integral(&self) -> ChebPanel {
        let a = &self.coeffs;
        let n = a.len();
        let get = |i: usize| if i < n { a[i] } else { 0.0 };
        let half = 0.5 * (self.hi - self.lo);
        let mut out = vec![0.0; n + 1];
        if n >= 1 {
            out[1] = (get(0) - 0.5 * get(2)) * half;
        }
        for (m, o) in out.iter_mut().enumerate().skip(2) {
            *o = (get(m - 1) - get(m + 1)) / (2.0 * m as f64) * half;
        }
        // value at y = -1 must vanish
        let at_lo: f64 = out
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, c)| if m % 2 == 0 { *c } else { -*c })
            .sum();
        out[0] = -at_lo;
        ChebPanel {
            lo: self.lo,
            hi: self.hi,
            coeffs: out,
        }
    }
}

pub fn clenshaw(coeffs: &[f64], y: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * y * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    y * b1 - b2 + coeffs.first().copied().unwrap_or(0.0)
}
