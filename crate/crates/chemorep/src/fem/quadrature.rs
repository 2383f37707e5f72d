//! Symmetric Gauss rules on the reference triangle {(0,0),(1,0),(0,1)}.

use crate::error::{Error, Result};

/// Quadrature points (reference coordinates) and weights summing to the
/// reference-triangle area 1/2.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// Highest polynomial degree integrated exactly.
    pub degree: usize,
}

/// Returns a symmetric rule exact for all polynomials up to `degree`
/// (1 <= degree <= 6). Degrees 3 and 5 are served by the next rule up.
pub fn quadrature(degree: usize) -> Result<QuadratureRule> {
    let rule = match degree {
        1 => centroid_rule(),
        2 => three_point_rule(),
        3 | 4 => six_point_rule(degree),
        5 | 6 => twelve_point_rule(degree),
        _ => {
            return Err(Error::Config(format!(
                "quadrature degree {degree} unsupported (need 1..=6)"
            )))
        }
    };
    Ok(rule)
}

fn centroid_rule() -> QuadratureRule {
    QuadratureRule {
        points: vec![[1.0 / 3.0, 1.0 / 3.0]],
        weights: vec![0.5],
        degree: 1,
    }
}

fn three_point_rule() -> QuadratureRule {
    let a = 1.0 / 6.0;
    let b = 2.0 / 3.0;
    QuadratureRule {
        points: vec![[a, a], [b, a], [a, b]],
        weights: vec![1.0 / 6.0; 3],
        degree: 2,
    }
}

/// Two three-point orbits, exact to degree 4.
fn six_point_rule(degree: usize) -> QuadratureRule {
    let orbits = [
        (0.445_948_490_915_965, 0.223_381_589_678_011),
        (0.091_576_213_509_771, 0.109_951_743_655_322),
    ];
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for &(a, w) in &orbits {
        let b = 1.0 - 2.0 * a;
        points.extend_from_slice(&[[a, a], [b, a], [a, b]]);
        weights.extend_from_slice(&[0.5 * w; 3]);
    }
    QuadratureRule {
        points,
        weights,
        degree,
    }
}

/// Two three-point orbits plus one six-point orbit, exact to degree 6.
fn twelve_point_rule(degree: usize) -> QuadratureRule {
    let sym3 = [
        (0.063_089_014_491_502, 0.050_844_906_370_207),
        (0.249_286_745_170_910, 0.116_786_275_726_379),
    ];
    let (a, b, w3) = (
        0.053_145_049_844_816,
        0.310_352_451_033_785,
        0.082_851_075_618_374,
    );
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for &(p, w) in &sym3 {
        let q = 1.0 - 2.0 * p;
        points.extend_from_slice(&[[p, p], [q, p], [p, q]]);
        weights.extend_from_slice(&[0.5 * w; 3]);
    }
    let c = 1.0 - a - b;
    points.extend_from_slice(&[[a, b], [b, a], [a, c], [c, a], [b, c], [c, b]]);
    weights.extend_from_slice(&[0.5 * w3; 6]);
    QuadratureRule {
        points,
        weights,
        degree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Exact monomial integral over the reference triangle:
    /// int x^p y^q dx dy = p! q! / (p + q + 2)!.
    fn exact_monomial(p: u32, q: u32) -> f64 {
        fn fact(n: u32) -> f64 {
            (1..=n).map(|k| k as f64).product()
        }
        fact(p) * fact(q) / fact(p + q + 2)
    }

    fn integrate(rule: &QuadratureRule, f: impl Fn(f64, f64) -> f64) -> f64 {
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(p, w)| w * f(p[0], p[1]))
            .sum()
    }

    #[test]
    fn weights_sum_to_reference_area() {
        for d in 1..=6 {
            let rule = quadrature(d).unwrap();
            let total: f64 = rule.weights.iter().sum();
            assert_abs_diff_eq!(total, 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn unit_integrand() {
        let rule = quadrature(6).unwrap();
        assert_abs_diff_eq!(integrate(&rule, |_, _| 1.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn x2y_matches_symbolic_value() {
        // int x^2 y over the reference triangle = 2! 1! / 5! = 1/60.
        let rule = quadrature(4).unwrap();
        assert_abs_diff_eq!(
            integrate(&rule, |x, y| x * x * y),
            1.0 / 60.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(exact_monomial(2, 1), 1.0 / 60.0, epsilon = 1e-18);
    }

    #[test]
    fn all_monomials_up_to_declared_degree() {
        for d in 1..=6usize {
            let rule = quadrature(d).unwrap();
            for p in 0..=rule.degree as u32 {
                for q in 0..=(rule.degree as u32 - p) {
                    let num = integrate(&rule, |x, y| x.powi(p as i32) * y.powi(q as i32));
                    assert_abs_diff_eq!(num, exact_monomial(p, q), epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn degree_boundary_is_a_real_boundary() {
        // The degree-4 rule is not exact for a degree-5 monomial; this marks
        // the contract boundary rather than asserting a particular value.
        let rule = quadrature(4).unwrap();
        let num = integrate(&rule, |x, y| x.powi(4) * y);
        let exact = exact_monomial(4, 1);
        assert!((num - exact).abs() > 1e-10);
    }

    #[test]
    fn unsupported_degree_rejected() {
        assert!(quadrature(0).is_err());
        assert!(quadrature(7).is_err());
    }
}
