//! Named limit constants with their recipes and reference decimals.

use super::expint::EULER_GAMMA;
use super::moments::{median_limit, moment_largest, moment_smallest};
use super::quad::QuadratureResult;
use crate::error::Result;

/// How a constant is obtained.
#[derive(Debug, Clone, Copy)]
pub enum Recipe {
    /// Elementary closed form.
    Closed(fn() -> f64),
    /// `_L G_a(1, h)`.
    LargestMoment { a: f64, h: u32 },
    /// `_L G_a(1, 2) - _L G_a(1, 1)²`.
    LargestVariance { a: f64 },
    /// Median of largest / n, by bisection.
    Median { a: f64 },
    /// `scale · _S G_a(1, h)`.
    SmallestMoment { a: f64, h: f64, scale: f64 },
}

#[derive(Debug, Clone)]
pub struct ConstantEntry {
    pub name: &'static str,
    /// Formula in words.
    pub formula: &'static str,
    /// Twenty-digit reference decimal.
    pub reference: &'static str,
    pub recipe: Recipe,
}

impl ConstantEntry {
    pub fn reference_value(&self) -> f64 {
        self.reference
            .parse()
            .expect("reference decimals are well formed")
    }

    pub fn has_closed_form(&self) -> bool {
        matches!(self.recipe, Recipe::Closed(_) | Recipe::Median { .. })
    }

    /// Evaluates the recipe to absolute accuracy `tol` (closed forms ignore it).
    pub fn evaluate(&self, tol: f64) -> Result<QuadratureResult> {
        let exact = |v: f64| QuadratureResult {
            value: v,
            abs_err: 2.0 * f64::EPSILON * v.abs(),
            truncation: f64::INFINITY,
        };
        match self.recipe {
            Recipe::Closed(f) => Ok(exact(f())),
            Recipe::Median { a } => median_limit(a).map(exact),
            Recipe::LargestMoment { a, h } => moment_largest(a, 1, h, tol),
            Recipe::LargestVariance { a } => {
                let m1 = moment_largest(a, 1, 1, tol / 4.0)?;
                let m2 = moment_largest(a, 1, 2, tol / 4.0)?;
                Ok(QuadratureResult {
                    value: m2.value - m1.value * m1.value,
                    abs_err: m2.abs_err + 2.0 * m1.value.abs() * m1.abs_err,
                    truncation: m1.truncation.max(m2.truncation),
                })
            }
            Recipe::SmallestMoment { a, h, scale } => {
                moment_smallest(a, 1, h, tol / scale).map(|r| r.scale(scale))
            }
        }
    }
}

fn euler_gamma() -> f64 {
    EULER_GAMMA
}

fn exp_minus_gamma() -> f64 {
    (-EULER_GAMMA).exp()
}

fn exp_one_minus_gamma() -> f64 {
    (1.0 - EULER_GAMMA).exp()
}

const SQRT2: f64 = std::f64::consts::SQRT_2;
const E: f64 = std::f64::consts::E;

/// Every named constant.
pub fn constants() -> Vec<ConstantEntry> {
    let e34 = 0.75f64.exp();
    vec![
        ConstantEntry {
            name: "euler_gamma",
            formula: "Euler's constant γ",
            reference: "0.57721566490153286061",
            recipe: Recipe::Closed(euler_gamma),
        },
        ConstantEntry {
            name: "golomb_dickman",
            formula: "_L G_1(1,1), limit of mean largest cycle / n",
            reference: "0.62432998854355087099",
            recipe: Recipe::LargestMoment { a: 1.0, h: 1 },
        },
        ConstantEntry {
            name: "permute_largest_variance",
            formula: "_L G_1(1,2) - _L G_1(1,1)^2",
            reference: "0.03690783006485220217",
            recipe: Recipe::LargestVariance { a: 1.0 },
        },
        ConstantEntry {
            name: "permute_largest_median",
            formula: "1/√e",
            reference: "0.60653065971263342360",
            recipe: Recipe::Median { a: 1.0 },
        },
        ConstantEntry {
            name: "permute_smallest_mean",
            formula: "e^{-γ} = _S G_1(1,1)",
            reference: "0.56145948356688516982",
            recipe: Recipe::Closed(exp_minus_gamma),
        },
        ConstantEntry {
            name: "permute_smallest_variance",
            formula: "_S G_1(1,2)",
            reference: "1.30720779891056809974",
            recipe: Recipe::SmallestMoment {
                a: 1.0,
                h: 2.0,
                scale: 1.0,
            },
        },
        ConstantEntry {
            name: "half_largest_mean",
            formula: "_L G_{1/2}(1,1), shared by graphs and mappings",
            reference: "0.75782301126849283774",
            recipe: Recipe::LargestMoment { a: 0.5, h: 1 },
        },
        ConstantEntry {
            name: "half_largest_variance",
            formula: "_L G_{1/2}(1,2) - _L G_{1/2}(1,1)^2",
            reference: "0.03700721658229030320",
            recipe: Recipe::LargestVariance { a: 0.5 },
        },
        ConstantEntry {
            name: "half_largest_median",
            formula: "4e/(1+e)^2",
            reference: "0.78644773296592741014",
            recipe: Recipe::Median { a: 0.5 },
        },
        ConstantEntry {
            name: "graph_smallest_mean",
            formula: "e^{3/4} _S G_{1/2}(1,1)",
            reference: "3.08504247563149222958",
            recipe: Recipe::SmallestMoment {
                a: 0.5,
                h: 1.0,
                scale: e34,
            },
        },
        ConstantEntry {
            name: "graph_smallest_variance",
            formula: "e^{3/4} _S G_{1/2}(1,2)",
            reference: "2.09583743942571712967",
            recipe: Recipe::SmallestMoment {
                a: 0.5,
                h: 2.0,
                scale: e34,
            },
        },
        ConstantEntry {
            name: "map_smallest_mean",
            formula: "√2 _S G_{1/2}(1,1)",
            reference: "2.06089224152016653900",
            recipe: Recipe::SmallestMoment {
                a: 0.5,
                h: 1.0,
                scale: SQRT2,
            },
        },
        ConstantEntry {
            name: "map_smallest_variance",
            formula: "√2 _S G_{1/2}(1,2)",
            reference: "1.40007638550124502818",
            recipe: Recipe::SmallestMoment {
                a: 0.5,
                h: 2.0,
                scale: SQRT2,
            },
        },
        ConstantEntry {
            name: "derange_smallest_mean_scale",
            formula: "e^{1-γ} = e · _S G_1(1,1)",
            reference: "1.52620511159586388047",
            recipe: Recipe::Closed(exp_one_minus_gamma),
        },
        ConstantEntry {
            name: "derange_smallest_variance",
            formula: "e · _S G_1(1,2)",
            reference: "3.55335920579854297440",
            recipe: Recipe::SmallestMoment {
                a: 1.0,
                h: 2.0,
                scale: E,
            },
        },
    ]
}

/// Looks up a constant by name.
pub fn constant(name: &str) -> Option<ConstantEntry> {
    constants().into_iter().find(|c| c.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medians_match_closed_forms() {
        let m = constant("permute_largest_median")
            .unwrap()
            .evaluate(1e-12)
            .unwrap();
        assert!((m.value - (-0.5f64).exp()).abs() < 1e-14);
        let m = constant("half_largest_median")
            .unwrap()
            .evaluate(1e-12)
            .unwrap();
        assert!((m.value - 4.0 * E / ((1.0 + E) * (1.0 + E))).abs() < 1e-14);
    }

    #[test]
    fn every_constant_matches_its_reference() {
        for c in constants() {
            let v = c.evaluate(1e-11).unwrap();
            let tol = if c.has_closed_form() { 1e-14 } else { 1e-9 };
            assert!(
                (v.value - c.reference_value()).abs() <= tol,
                "{}: {} vs {}",
                c.name,
                v.value,
                c.reference
            );
        }
    }

    #[test]
    fn lookup_by_name() {
        assert!(constant("map_smallest_mean").is_some());
        assert!(constant("nope").is_none());
    }
}
