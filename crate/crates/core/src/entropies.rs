//! Numeric path: weighted quadrature for entropic moments at real order,
//! the Shannon entropy, and a numeric Fisher-information oracle.
//!
//! Every integral here is one-dimensional because the density factorizes
//! over the polar angles. Moment integrands absorb the fixed part of the
//! weight, (1 - x^2)^(alpha_j - 1/2), into a cached Gauss-Jacobi rule; the
//! order-dependent part rides along in the integrand, which keeps one rule
//! table per factor regardless of q. Shannon integrands carry logarithmic
//! singularities at the polynomial zeros, so those integrals split at the
//! zeros and use Legendre nodes per subinterval, in the theta variable
//! where the endpoint factors are analytic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{legendre_rule, symmetric_jacobi_rule};
use crate::special::gegenbauer_zeros;
use crate::state::HyperState;

/// Node counts and tolerances for all refined integrals. Refinement doubles
/// the node count until two consecutive evaluations agree to `rel_tol`.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSpec {
    pub initial_nodes: usize,
    pub max_nodes: usize,
    pub rel_tol: f64,
}

impl QuadratureSpec {
    pub fn new(initial_nodes: usize, max_nodes: usize, rel_tol: f64) -> Result<Self> {
        if initial_nodes < 8 {
            return Err(Error::domain(format!(
                "initial node count must be at least 8, got {initial_nodes}"
            )));
        }
        if max_nodes < initial_nodes {
            return Err(Error::domain(
                "max_nodes must not be smaller than initial_nodes",
            ));
        }
        if !(rel_tol > 0.0) {
            return Err(Error::domain(format!(
                "relative tolerance must be positive, got {rel_tol}"
            )));
        }
        Ok(QuadratureSpec {
            initial_nodes,
            max_nodes,
            rel_tol,
        })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            initial_nodes: 64,
            max_nodes: 4096,
            rel_tol: 1e-11,
        }
    }
}

/// Which route produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Quadrature,
    ClosedForm,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed-form",
        })
    }
}

/// A computed measure with its method tag and absolute error estimate.
///
/// Refinement that hits `max_nodes` without meeting the tolerance is not an
/// error; it shows up as an error estimate larger than `rel_tol * |value|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarResult {
    pub value: f64,
    pub error: f64,
    pub method: Method,
}

impl ScalarResult {
    pub fn converged(&self, spec: &QuadratureSpec) -> bool {
        self.error <= spec.rel_tol * self.value.abs().max(1.0) * 4.0
    }
}

/// Doubles the node count until two consecutive evaluations agree.
/// Returns the last value and the last refinement difference.
fn refine_doubling<F>(spec: &QuadratureSpec, scale_floor: f64, mut eval: F) -> Result<(f64, f64)>
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut nodes = spec.initial_nodes;
    let mut prev = eval(nodes)?;
    let mut last_diff = prev.abs().max(scale_floor);
    while nodes * 2 <= spec.max_nodes {
        nodes *= 2;
        let cur = eval(nodes)?;
        last_diff = (cur - prev).abs();
        prev = cur;
        if last_diff <= spec.rel_tol * cur.abs().max(scale_floor) {
            break;
        }
    }
    Ok((prev, last_diff))
}

/// Entropic moment W_q by weighted quadrature, any real q > 0:
///
///   W_q = (2 pi)^(1-q) prod_j  int_-1^1 g_j(x)^q (1 - x^2)^(alpha_j - 1/2) dx
///
/// with g_j(x) = C_hat(x)^2 (1 - x^2)^(mu'), the polynomial part of the
/// density factor. For integer q the integrand is a polynomial and the
/// first refinement already certifies an exact rule.
pub fn entropic_moment_quadrature(
    state: &HyperState,
    q: f64,
    spec: &QuadratureSpec,
) -> Result<ScalarResult> {
    if !(q > 0.0) {
        return Err(Error::domain(format!(
            "moment order must be positive, got {q}"
        )));
    }
    let mut value = ((1.0 - q) * (2.0 * std::f64::consts::PI).ln()).exp();
    let mut rel_error = 4.0 * f64::EPSILON;
    let integer_q = q.fract() == 0.0 && q <= i32::MAX as f64;
    for factor in state.factorize() {
        let eval = factor.evaluator();
        let mu_power = factor.mu_next() as i32;
        let weight_exp = factor.alpha() - 0.5;
        let (integral, diff) = refine_doubling(spec, 0.0, |n| {
            let rule = symmetric_jacobi_rule(weight_exp, n)?;
            Ok(rule.integrate(|x| {
                let u = eval.eval(x);
                let g = u * u * (1.0 - x * x).powi(mu_power);
                if integer_q {
                    g.powi(q as i32)
                } else {
                    g.powf(q)
                }
            }))
        })?;
        value *= integral;
        rel_error += diff / integral.abs().max(f64::MIN_POSITIVE);
    }
    Ok(ScalarResult {
        value,
        error: value.abs() * rel_error,
        method: Method::Quadrature,
    })
}

/// Shannon entropy S = log(2 pi) + sum_j S_j with
///
///   S_j = - int_0^pi g_j(theta) log g_j(theta) sin(theta)^(2 alpha_j) dtheta.
///
/// Each integral splits at the zeros of the Gegenbauer factor, where the
/// logarithm has an integrable singularity; Gauss nodes never touch the
/// subinterval endpoints.
pub fn shannon_entropy(state: &HyperState, spec: &QuadratureSpec) -> Result<ScalarResult> {
    let mut value = (2.0 * std::f64::consts::PI).ln();
    let mut abs_error = 4.0 * f64::EPSILON;
    for factor in state.factorize() {
        let eval = factor.evaluator();
        let mu2 = f64::from(factor.mu_next());
        let two_alpha = 2.0 * factor.alpha();
        let mut bounds: Vec<f64> = vec![0.0];
        bounds.extend(
            gegenbauer_zeros(factor.degree, factor.lambda)
                .into_iter()
                .rev()
                .map(f64::acos),
        );
        bounds.push(std::f64::consts::PI);

        let integrand = |theta: f64| -> f64 {
            let (s, c) = theta.sin_cos();
            let u = eval.eval(c).abs();
            if u == 0.0 || s <= 0.0 {
                return 0.0;
            }
            let log_g = 2.0 * u.ln() + 2.0 * mu2 * s.ln();
            let p = (log_g + two_alpha * s.ln()).exp();
            -p * log_g
        };

        let (part, diff) = refine_doubling(spec, 1.0, |n| {
            let rule = legendre_rule(n)?;
            let mut total = 0.0;
            for w in bounds.windows(2) {
                total += rule.integrate_mapped(w[0], w[1], integrand);
            }
            Ok(total)
        })?;
        value += part;
        abs_error += diff;
    }
    Ok(ScalarResult {
        value,
        error: abs_error,
        method: Method::Quadrature,
    })
}

/// Numeric Fisher information: the integral of |grad rho|^2 / rho over the
/// sphere with the intrinsic angular gradient. The density does not depend
/// on the azimuthal angle, so the gradient reduces to the polar factors and
/// the integral to products of one-dimensional pieces:
///
///   F = sum_k A_k prod_(i<k) B_i,
///   A_k = int (2 s^2 dC_hat - 2 mu' c C_hat)^2 s^(2 mu' + 2 alpha_k - 2) dtheta,
///   B_i = int C_hat^2 s^(2 mu' + 2 alpha_i - 2) dtheta,
///
/// all analytic in theta, so plain Legendre refinement converges fast. At
/// the zeros of a factor the 1/rho singularity cancels inside the square.
pub fn fisher_numeric(state: &HyperState, spec: &QuadratureSpec) -> Result<ScalarResult> {
    if state.dimension() < 3 {
        return Err(Error::domain(
            "the numeric Fisher oracle needs dimension >= 3",
        ));
    }
    let factors = state.factorize();
    let mut b_values = Vec::new();
    let mut b_errors = Vec::new();
    // B_i only multiplies terms with k > i, so the last factor never needs one
    for factor in factors.iter().take(factors.len() - 1) {
        let eval = factor.evaluator();
        let power = factor.sin_power as i32 + (2.0 * factor.alpha()) as i32 - 2;
        debug_assert!(power >= 0);
        let (b, diff) = refine_doubling(spec, 1.0, |n| {
            let rule = legendre_rule(n)?;
            Ok(rule.integrate_mapped(0.0, std::f64::consts::PI, |theta| {
                let (s, c) = theta.sin_cos();
                let u = eval.eval(c);
                u * u * s.powi(power)
            }))
        })?;
        b_values.push(b);
        b_errors.push(diff);
    }

    let mut fisher = 0.0;
    let mut abs_error = 0.0;
    for (k, factor) in factors.iter().enumerate() {
        if factor.degree == 0 && factor.sin_power == 0 {
            continue; // constant factor, no gradient
        }
        let eval = factor.evaluator();
        let mu2 = f64::from(factor.mu_next());
        let tail_exp = mu2 + factor.alpha() - 1.0;
        let (a_k, a_diff) = refine_doubling(spec, 1.0, |n| {
            let rule = legendre_rule(n)?;
            Ok(rule.integrate_mapped(0.0, std::f64::consts::PI, |theta| {
                let (s, c) = theta.sin_cos();
                let w = 2.0 * s * s * eval.deriv(c) - 2.0 * mu2 * c * eval.eval(c);
                let t = w * s.powf(tail_exp);
                t * t
            }))
        })?;
        let prefix: f64 = b_values[..k].iter().product();
        fisher += a_k * prefix;
        let mut term_err = a_diff * prefix;
        for i in 0..k {
            term_err += a_k * prefix / b_values[i].abs().max(f64::MIN_POSITIVE) * b_errors[i];
        }
        abs_error += term_err;
    }
    Ok(ScalarResult {
        value: fisher,
        error: abs_error + 8.0 * f64::EPSILON * fisher.abs(),
        method: Method::Quadrature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearization::entropic_moment_exact;
    use crate::special::lgamma;

    const PI: f64 = std::f64::consts::PI;

    fn state(d: usize, mu: &[i64]) -> HyperState {
        HyperState::new(d, mu.to_vec()).unwrap()
    }

    #[test]
    fn moment_anchors() {
        let spec = QuadratureSpec::default();
        let w = entropic_moment_quadrature(&state(3, &[0, 0]), 2.0, &spec).unwrap();
        assert!((w.value - 1.0 / (4.0 * PI)).abs() < 1e-10);
        assert_eq!(w.method, Method::Quadrature);

        let w = entropic_moment_quadrature(&state(3, &[1, 0]), 1.0, &spec).unwrap();
        assert!((w.value - 1.0).abs() < 1e-10);

        // real order against the closed form 2^(1+q) pi^(3/2-2q) G(1/2+q)/G(2+q)
        let q = 2.5;
        let want = (2.0f64.ln() * (1.0 + q) + PI.ln() * (1.5 - 2.0 * q) + lgamma(0.5 + q)
            - lgamma(2.0 + q))
        .exp();
        let w = entropic_moment_quadrature(&state(4, &[1, 0, 0]), q, &spec).unwrap();
        assert!(
            (w.value - want).abs() < 1e-11,
            "got {} want {want}",
            w.value
        );
        assert!(w.converged(&spec));

        assert!(entropic_moment_quadrature(&state(3, &[1, 0]), 0.0, &spec).is_err());
        assert!(entropic_moment_quadrature(&state(3, &[1, 0]), -2.0, &spec).is_err());
    }

    #[test]
    fn normalization_across_dimensions() {
        let spec = QuadratureSpec::default();
        for d in 2..=6usize {
            let mu: Vec<i64> = (0..d - 1).map(|i| (8 - i as i64).max(3)).collect();
            let s = HyperState::new(d, mu).unwrap();
            let w = entropic_moment_quadrature(&s, 1.0, &spec).unwrap();
            assert!((w.value - 1.0).abs() < 1e-10, "{s}: {}", w.value);
        }
    }

    #[test]
    fn shannon_anchors() {
        let spec = QuadratureSpec::default();
        let s = shannon_entropy(&state(3, &[0, 0]), &spec).unwrap();
        assert!((s.value - (4.0 * PI).ln()).abs() < 1e-12);

        let s = shannon_entropy(&state(2, &[7]), &spec).unwrap();
        assert!((s.value - (2.0 * PI).ln()).abs() < 1e-15);

        // analytic value ln(4 pi / 3) + 2/3 from int x^2 ln x^2 dx = -4/9
        let s = shannon_entropy(&state(3, &[1, 0]), &spec).unwrap();
        let want = (4.0 * PI / 3.0).ln() + 2.0 / 3.0;
        assert!((s.value - want).abs() < 1e-9, "got {} want {want}", s.value);
    }

    #[test]
    fn shannon_handles_high_degree_and_sign() {
        let spec = QuadratureSpec::default();
        let a = shannon_entropy(&state(3, &[12, 5]), &spec).unwrap();
        let b = shannon_entropy(&state(3, &[12, -5]), &spec).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
        assert!(a.converged(&spec));
    }

    #[test]
    fn fisher_numeric_anchors() {
        let spec = QuadratureSpec::default();
        let f = fisher_numeric(&state(3, &[0, 0]), &spec).unwrap();
        assert!(f.value.abs() < 1e-12);

        let f = fisher_numeric(&state(3, &[1, 0]), &spec).unwrap();
        assert!((f.value - 8.0).abs() < 1e-9, "got {}", f.value);

        let f = fisher_numeric(&state(3, &[2, 1]), &spec).unwrap();
        assert!((f.value - 14.0).abs() < 1e-9, "got {}", f.value);

        assert!(fisher_numeric(&state(2, &[3]), &spec).is_err());
    }

    #[test]
    fn dual_path_agreement_spot_checks() {
        let spec = QuadratureSpec::default();
        for (d, mu) in [
            (3usize, vec![5i64, 2]),
            (4, vec![4, 2, -1]),
            (5, vec![6, 4, 4, 3]),
        ] {
            let s = HyperState::new(d, mu).unwrap();
            for q in [2u32, 3, 4] {
                let exact = entropic_moment_exact(&s, q).unwrap().value.value();
                let quad = entropic_moment_quadrature(&s, f64::from(q), &spec)
                    .unwrap()
                    .value;
                assert!(
                    (exact - quad).abs() <= 1e-8 * quad.abs(),
                    "{s} q={q}: exact {exact} vs quadrature {quad}"
                );
            }
        }
    }

    #[test]
    fn dual_path_agreement_full_grid_q4() {
        // the higher order stresses both the linearization replicas and the
        // order-dependent part of the quadrature weight
        let spec = QuadratureSpec::default();
        for d in [3usize, 4, 5] {
            for s in HyperState::enumerate(d, 8) {
                let exact = entropic_moment_exact(&s, 4).unwrap().value.value();
                let quad = entropic_moment_quadrature(&s, 4.0, &spec).unwrap().value;
                assert!(
                    (exact - quad).abs() <= 1e-8 * quad.abs(),
                    "{s}: exact {exact} vs quadrature {quad}"
                );
            }
        }
    }

    #[test]
    fn renyi_is_monotone_in_q() {
        let spec = QuadratureSpec::default();
        let qs = [0.5, 0.9999, 1.0001, 1.5, 2.0, 3.0, 4.0];
        for (d, mu) in [(3usize, vec![6i64, 2]), (4, vec![5, 3, 3]), (2, vec![4])] {
            let s = HyperState::new(d, mu).unwrap();
            let renyi: Vec<f64> = qs
                .iter()
                .map(|&q| {
                    let w = entropic_moment_quadrature(&s, q, &spec).unwrap().value;
                    w.ln() / (1.0 - q)
                })
                .collect();
            for pair in renyi.windows(2) {
                assert!(
                    pair[1] <= pair[0] + 1e-8 * pair[0].abs().max(1.0),
                    "{s}: {renyi:?}"
                );
            }
            // the two orders closest to 1 bracket the Shannon entropy
            let shannon = shannon_entropy(&s, &spec).unwrap().value;
            assert!((renyi[1] - shannon).abs() < 1e-3);
            assert!((renyi[2] - shannon).abs() < 1e-3);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(4, 64, 1e-9).is_err());
        assert!(QuadratureSpec::new(64, 32, 1e-9).is_err());
        assert!(QuadratureSpec::new(64, 128, 0.0).is_err());
        assert!(QuadratureSpec::new(64, 4096, 1e-11).is_ok());
    }
}
