//! Gauss quadrature rules for the symmetric Jacobi weight (1 - x^2)^a on
//! [-1, 1], generated by the Golub-Welsch method.
//!
//! The Jacobi matrix of a symmetric weight is tridiagonal with zero
//! diagonal, so nodes and weights come out of an O(n^2) implicit-shift QL
//! sweep that tracks only the first row of the eigenvector matrix. Rules are
//! cached per (2a, n); every weight exponent used by the density factors is
//! a half-integer, so the key is exact.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::special::lgamma;

/// Nodes and weights of one quadrature rule.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Integrates f against the rule's weight over [-1, 1].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Integrates f over [lo, hi] after an affine map of the nodes. Only
    /// meaningful for the Legendre rule (a = 0), where the weight is flat.
    pub fn integrate_mapped<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum();
        half * sum
    }
}

/// Implicit-shift QL on a symmetric tridiagonal matrix, accumulating the
/// first row of the eigenvector matrix in z.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
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
            if iter > 64 {
                return Err(Error::EigenConvergence(n));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
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
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Builds the n-point Gauss rule for the weight (1 - x^2)^a, a > -1.
pub fn build_symmetric_jacobi(a: f64, n: usize) -> Result<GaussRule> {
    if !(a > -1.0) {
        return Err(Error::domain(format!(
            "weight exponent must exceed -1, got {a}"
        )));
    }
    if n == 0 {
        return Err(Error::domain("quadrature rule needs at least one node"));
    }
    // first moment of the weight: 2^(2a+1) B(a+1, a+1)
    let mu0 = ((2.0 * a + 1.0) * std::f64::consts::LN_2 + 2.0 * lgamma(a + 1.0)
        - lgamma(2.0 * a + 2.0))
    .exp();

    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for (k, slot) in e.iter_mut().enumerate().take(n - 1) {
        let kf = (k + 1) as f64;
        // k = 1 cancels the (k + 2a) zero against (2k + 2a - 1) at a = -1/2
        *slot = if k == 0 {
            (1.0 / (3.0 + 2.0 * a)).sqrt()
        } else {
            (kf * (kf + 2.0 * a)
                / ((2.0 * kf + 2.0 * a + 1.0) * (2.0 * kf + 2.0 * a - 1.0)))
                .sqrt()
        };
    }
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    tridiagonal_ql(&mut d, &mut e, &mut z)?;

    let mut pairs: Vec<(f64, f64)> = d
        .into_iter()
        .zip(z.into_iter().map(|v| mu0 * v * v))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    // enforce the symmetry of the weight exactly
    let len = pairs.len();
    for i in 0..len / 2 {
        let node = 0.5 * (pairs[i].0 - pairs[len - 1 - i].0);
        let weight = 0.5 * (pairs[i].1 + pairs[len - 1 - i].1);
        pairs[i] = (node, weight);
        pairs[len - 1 - i] = (-node, weight);
    }
    if len % 2 == 1 {
        pairs[len / 2].0 = 0.0;
    }

    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(GaussRule { nodes, weights })
}

type RuleCache = Mutex<HashMap<(i64, usize), Arc<GaussRule>>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached rule lookup. Exponents that are not half-integers bypass the
/// cache (they never occur on the density path).
pub fn symmetric_jacobi_rule(a: f64, n: usize) -> Result<Arc<GaussRule>> {
    let doubled = 2.0 * a;
    if (doubled - doubled.round()).abs() > 1e-12 {
        return Ok(Arc::new(build_symmetric_jacobi(a, n)?));
    }
    let key = (doubled.round() as i64, n);
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(build_symmetric_jacobi(a, n)?);
    cache()
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}

/// Gauss-Legendre rule (flat weight).
pub fn legendre_rule(n: usize) -> Result<Arc<GaussRule>> {
    symmetric_jacobi_rule(0.0, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_five_point_reference() {
        let rule = build_symmetric_jacobi(0.0, 5).unwrap();
        let nodes = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683_1,
            0.0,
            0.538_469_310_105_683_1,
            0.906_179_845_938_664,
        ];
        let weights = [
            0.236_926_885_056_189_08,
            0.478_628_670_499_366_47,
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_47,
            0.236_926_885_056_189_08,
        ];
        for i in 0..5 {
            assert!((rule.nodes[i] - nodes[i]).abs() < 1e-14);
            assert!((rule.weights[i] - weights[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn chebyshev_second_kind_closed_form() {
        // a = 1/2: nodes cos(k pi/(n+1)), weights pi/(n+1) sin^2(k pi/(n+1))
        let n = 9;
        let rule = build_symmetric_jacobi(0.5, n).unwrap();
        for k in 1..=n {
            let theta = std::f64::consts::PI * k as f64 / (n + 1) as f64;
            let x = -theta.cos();
            let w = std::f64::consts::PI / (n + 1) as f64 * theta.sin().powi(2);
            assert!((rule.nodes[k - 1] - x).abs() < 1e-13, "node {k}");
            assert!((rule.weights[k - 1] - w).abs() < 1e-13, "weight {k}");
        }
    }

    #[test]
    fn chebyshev_first_kind_closed_form() {
        // a = -1/2: uniform weights pi/n
        let n = 8;
        let rule = build_symmetric_jacobi(-0.5, n).unwrap();
        let w = std::f64::consts::PI / n as f64;
        for k in 0..n {
            let theta = std::f64::consts::PI * (2.0 * (n - k) as f64 - 1.0) / (2.0 * n as f64);
            assert!((rule.nodes[k] - theta.cos()).abs() < 1e-13);
            assert!((rule.weights[k] - w).abs() < 1e-13);
        }
    }

    #[test]
    fn polynomial_exactness() {
        // a 12-point rule integrates monomials up to degree 23 exactly
        let rule = build_symmetric_jacobi(0.0, 12).unwrap();
        for k in (0..=23usize).step_by(2) {
            let integral = rule.integrate(|x| x.powi(k as i32));
            let exact = 2.0 / (k as f64 + 1.0);
            assert!((integral - exact).abs() < 1e-13, "degree {k}");
        }
        for k in (1..=23usize).step_by(2) {
            assert!(rule.integrate(|x| x.powi(k as i32)).abs() < 1e-14);
        }
        // weighted exactness for a = 3/2 against ln-gamma Beta values
        let rule = build_symmetric_jacobi(1.5, 20).unwrap();
        for k in (0..=20usize).step_by(2) {
            // int x^k (1-x^2)^(3/2) dx = B((k+1)/2, 5/2)
            let exact = (lgamma((k as f64 + 1.0) / 2.0) + lgamma(2.5)
                - lgamma((k as f64 + 1.0) / 2.0 + 2.5))
            .exp();
            let integral = rule.integrate(|x| x.powi(k as i32));
            assert!((integral - exact).abs() < 1e-14 * exact.max(1.0), "degree {k}");
        }
    }

    #[test]
    fn mapped_integration() {
        let rule = build_symmetric_jacobi(0.0, 16).unwrap();
        let integral = rule.integrate_mapped(0.0, std::f64::consts::PI, f64::sin);
        assert!((integral - 2.0).abs() < 1e-13);
    }

    #[test]
    fn large_rule_stays_sane() {
        let rule = build_symmetric_jacobi(0.5, 1024).unwrap();
        assert_eq!(rule.nodes.len(), 1024);
        let total: f64 = rule.weights.iter().sum();
        // sum of weights = first moment = pi/2 for a = 1/2
        assert!((total - std::f64::consts::PI / 2.0).abs() < 1e-12);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn cache_rejects_bad_exponent() {
        assert!(symmetric_jacobi_rule(-1.0, 8).is_err());
        assert!(build_symmetric_jacobi(0.0, 0).is_err());
    }
}
