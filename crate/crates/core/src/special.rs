//! Gamma-family utilities, sign-tracked log-space arithmetic and orthonormal
//! Gegenbauer polynomial evaluation.
//!
//! Everything that involves ratios of gamma functions is computed in log
//! space: the hyperquantum numbers reach l = 80 and the moment order
//! multiplies them, so intermediate gamma arguments exceed 300 and would
//! overflow in linear double precision.

use crate::error::{Error, Result};

/// ln(pi)
const LN_PI: f64 = 1.1447298858494002;
/// ln(2 * sqrt(e / pi))
const LN_2_SQRT_E_OVER_PI: f64 = 0.6207822376352452;

/// Coefficients of the Lanczos series for the gamma function
/// (Pugh 2004, the same table used by statrs).
const GAMMA_DK: &[f64] = &[
    2.4857408913875355e-5,
    1.0514237858172197,
    -3.4568709722201625,
    4.512277094668948,
    -2.9828522532357664,
    1.056397115771267,
    -1.9542877319164587e-1,
    1.709705434044412e-2,
    -5.719261174043057e-4,
    4.633994733599057e-6,
    -2.7199490848860772e-9,
];

const GAMMA_R: f64 = 10.900511;

/// ln Gamma(x) for x > 0, accurate to ~1e-14 relative. Callers must
/// guarantee positivity; the public checked entry point is [`log_gamma`].
pub(crate) fn lgamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "lgamma requires a positive argument, got {x}");
    if x < 0.5 {
        let s = GAMMA_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(GAMMA_DK[0], |s, t| s + t.1 / (t.0 as f64 - x));
        LN_PI
            - (std::f64::consts::PI * x).sin().ln()
            - s.ln()
            - LN_2_SQRT_E_OVER_PI
            - (0.5 - x) * ((0.5 - x + GAMMA_R) / std::f64::consts::E).ln()
    } else {
        let s = GAMMA_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(GAMMA_DK[0], |s, t| s + t.1 / (x + t.0 as f64 - 1.0));
        s.ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + GAMMA_R) / std::f64::consts::E).ln()
    }
}

/// Natural log of the gamma function on the positive half line.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!(
            "log_gamma requires x > 0, got {x}"
        )));
    }
    Ok(lgamma(x))
}

/// A real number stored as `sign * exp(log_magnitude)`.
///
/// `sign == 0` means the value is exactly zero and `log_magnitude` is
/// meaningless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSigned {
    pub log_magnitude: f64,
    pub sign: i8,
}

impl LogSigned {
    pub fn zero() -> Self {
        LogSigned {
            log_magnitude: f64::NEG_INFINITY,
            sign: 0,
        }
    }

    pub fn one() -> Self {
        LogSigned {
            log_magnitude: 0.0,
            sign: 1,
        }
    }

    /// A positive value given directly by its natural log.
    pub fn from_log(log_magnitude: f64) -> Self {
        LogSigned {
            log_magnitude,
            sign: 1,
        }
    }

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            LogSigned::zero()
        } else {
            LogSigned {
                log_magnitude: v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Back to linear space. Overflows to +-inf past ~exp(709).
    pub fn value(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_magnitude.exp(),
        }
    }

    pub fn powi(&self, k: i32) -> Self {
        if self.sign == 0 {
            return if k == 0 { LogSigned::one() } else { LogSigned::zero() };
        }
        let sign = if self.sign < 0 && k % 2 != 0 { -1 } else { 1 };
        LogSigned {
            log_magnitude: self.log_magnitude * f64::from(k),
            sign,
        }
    }
}

impl std::ops::Mul for LogSigned {
    type Output = LogSigned;
    fn mul(self, rhs: LogSigned) -> LogSigned {
        if self.sign == 0 || rhs.sign == 0 {
            return LogSigned::zero();
        }
        LogSigned {
            log_magnitude: self.log_magnitude + rhs.log_magnitude,
            sign: self.sign * rhs.sign,
        }
    }
}

impl std::ops::Div for LogSigned {
    type Output = LogSigned;
    fn div(self, rhs: LogSigned) -> LogSigned {
        assert!(rhs.sign != 0, "division of LogSigned by exact zero");
        if self.sign == 0 {
            return LogSigned::zero();
        }
        LogSigned {
            log_magnitude: self.log_magnitude - rhs.log_magnitude,
            sign: self.sign * rhs.sign,
        }
    }
}

/// Pochhammer symbol (a)_k = a (a+1) ... (a+k-1) with sign tracking.
///
/// The base may be a negative integer, in which case the product passes
/// through zero once k exceeds -a and the result is exactly zero.
pub fn pochhammer_log_signed(a: f64, k: u32) -> LogSigned {
    let mut sign = 1i8;
    let mut log = 0.0f64;
    for i in 0..k {
        let factor = a + f64::from(i);
        if factor == 0.0 {
            return LogSigned::zero();
        }
        if factor < 0.0 {
            sign = -sign;
        }
        log += factor.abs().ln();
    }
    LogSigned {
        log_magnitude: log,
        sign,
    }
}

/// Normalization constant d_n of the Jacobi polynomial P_n^(alpha,beta):
///
///   d_n = sqrt( 2^(a+b+1) G(n+a+1) G(n+b+1) / ( n! (2n+a+b+1) G(n+a+b+1) ) )
///
/// Always positive. For n = 0 the denominator is rewritten as G(a+b+2) so
/// that parameters with a+b+1 < 0 stay inside the gamma domain.
pub fn jacobi_norm(n: usize, alpha: f64, beta: f64) -> Result<LogSigned> {
    if !(alpha > -1.0) || !(beta > -1.0) {
        return Err(Error::domain(format!(
            "jacobi_norm requires alpha, beta > -1, got ({alpha}, {beta})"
        )));
    }
    let nf = n as f64;
    let log_sq = if n == 0 {
        (alpha + beta + 1.0) * std::f64::consts::LN_2 + lgamma(alpha + 1.0)
            + lgamma(beta + 1.0)
            - lgamma(alpha + beta + 2.0)
    } else {
        (alpha + beta + 1.0) * std::f64::consts::LN_2
            + lgamma(nf + alpha + 1.0)
            + lgamma(nf + beta + 1.0)
            - lgamma(nf + 1.0)
            - (2.0 * nf + alpha + beta + 1.0).ln()
            - lgamma(nf + alpha + beta + 1.0)
    };
    Ok(LogSigned::from_log(0.5 * log_sq))
}

/// Degree and parameter of an orthonormal Gegenbauer polynomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolySpec {
    pub degree: usize,
    pub lambda: f64,
}

impl PolySpec {
    pub fn new(degree: usize, lambda: f64) -> Result<Self> {
        if !(lambda > -0.5) {
            return Err(Error::domain(format!(
                "Gegenbauer parameter must exceed -1/2, got {lambda}"
            )));
        }
        Ok(PolySpec { degree, lambda })
    }
}

/// Classical symmetric Jacobi polynomial P_n^(a,a)(x) by the three-term
/// recurrence. Stable for a > -1, which covers every lambda > -1/2.
fn jacobi_symmetric(n: usize, a: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = (a + 1.0) * x;
    for k in 2..=n {
        let kf = k as f64;
        let ka = 2.0 * (kf + a);
        let coef_x = (ka - 1.0) * ka * (ka - 2.0);
        let coef_prev = 2.0 * (kf + a - 1.0) * (kf + a - 1.0) * ka;
        let denom = 2.0 * kf * (kf + 2.0 * a) * (ka - 2.0);
        let next = (coef_x * x * cur - coef_prev * prev) / denom;
        prev = cur;
        cur = next;
    }
    cur
}

/// Orthonormal Gegenbauer evaluator prepared once per (degree, lambda):
/// caches the log-space normalization so hot loops pay only the recurrence.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GegenbauerEval {
    degree: usize,
    a: f64,
    inv_norm: f64,
    deriv_coef: f64,
}

impl GegenbauerEval {
    pub(crate) fn new(spec: PolySpec) -> Self {
        let a = spec.lambda - 0.5;
        let norm = jacobi_norm(spec.degree, a, a)
            .expect("PolySpec guarantees lambda > -1/2");
        GegenbauerEval {
            degree: spec.degree,
            a,
            inv_norm: (-norm.log_magnitude).exp(),
            deriv_coef: (spec.degree as f64 + 2.0 * a + 1.0) / 2.0,
        }
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        jacobi_symmetric(self.degree, self.a, x) * self.inv_norm
    }

    /// d/dx of the orthonormal polynomial, via
    /// d/dx P_n^(a,a) = (n + 2a + 1)/2 * P_(n-1)^(a+1,a+1).
    pub(crate) fn deriv(&self, x: f64) -> f64 {
        if self.degree == 0 {
            return 0.0;
        }
        self.deriv_coef * jacobi_symmetric(self.degree - 1, self.a + 1.0, x) * self.inv_norm
    }
}

fn check_interval(x: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::domain(format!(
            "Gegenbauer argument must lie in [-1, 1], got {x}"
        )));
    }
    Ok(())
}

/// Orthonormal Gegenbauer polynomial: integrates against itself to one under
/// the weight (1 - x^2)^(lambda - 1/2) on [-1, 1].
pub fn gegenbauer_orthonormal(spec: PolySpec, x: f64) -> Result<f64> {
    check_interval(x)?;
    Ok(GegenbauerEval::new(spec).eval(x))
}

/// First derivative of the orthonormal Gegenbauer polynomial.
pub fn gegenbauer_orthonormal_derivative(spec: PolySpec, x: f64) -> Result<f64> {
    check_interval(x)?;
    Ok(GegenbauerEval::new(spec).deriv(x))
}

/// The n simple zeros of the degree-n Gegenbauer polynomial, ascending in
/// (-1, 1). Brackets sign changes on a cosine-spaced grid (which clusters
/// toward the endpoints exactly like the zeros do) and bisects each bracket.
pub(crate) fn gegenbauer_zeros(degree: usize, lambda: f64) -> Vec<f64> {
    if degree == 0 {
        return Vec::new();
    }
    let a = lambda - 0.5;
    let f = |x: f64| jacobi_symmetric(degree, a, x);
    let mut grid = 16 * degree + 32;
    for _ in 0..4 {
        let zeros = scan_for_zeros(&f, grid);
        if zeros.len() == degree {
            return zeros;
        }
        grid *= 4;
    }
    scan_for_zeros(&f, grid)
}

fn scan_for_zeros(f: &dyn Fn(f64) -> f64, grid: usize) -> Vec<f64> {
    let mut zeros = Vec::new();
    let point = |i: usize| -(std::f64::consts::PI * i as f64 / grid as f64).cos();
    let eval = |x: f64| {
        let v = f(x);
        // nudge off an exact zero so sign bracketing stays well defined
        if v == 0.0 {
            f(x + 1e-13)
        } else {
            v
        }
    };
    let mut prev_x = point(0);
    let mut prev_f = eval(prev_x);
    for i in 1..=grid {
        let x = point(i);
        let fx = eval(x);
        if prev_f.signum() != fx.signum() {
            let (mut lo, mut hi, mut flo) = (prev_x, x, prev_f);
            for _ in 0..90 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = fx;
    }
    zeros
}
