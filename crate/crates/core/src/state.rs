//! Hyperspherical-harmonic states and their probability densities.
//!
//! A state on the unit sphere in D dimensions is labeled by D-1 integers
//! mu_1 >= mu_2 >= ... >= |mu_(D-1)| >= 0 (written l for mu_1 and m for the
//! last entry). Its squared modulus factorizes over the polar angles, one
//! Gegenbauer factor per angle, which is what every measure in this crate
//! exploits.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{GegenbauerEval, PolySpec};

/// A validated hyperspherical-harmonic state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HyperState {
    dimension: usize,
    mu: Vec<i64>,
}

impl HyperState {
    /// Builds and validates a state. For D >= 3 the quantum numbers must
    /// satisfy the decreasing chain with |m| bounded by the second-to-last
    /// entry; for D = 2 the single entry is any integer.
    pub fn new(dimension: usize, mu: Vec<i64>) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::Dimension(dimension));
        }
        if mu.len() != dimension - 1 {
            return Err(Error::QuantumNumberCount {
                dimension,
                expected: dimension - 1,
                got: mu.len(),
            });
        }
        if dimension >= 3 {
            // mu_1 >= mu_2 >= ... >= mu_(D-2) >= |mu_(D-1)| >= 0
            let last = mu.len() - 1;
            for i in 0..last {
                let next = if i + 1 == last { mu[i + 1].abs() } else { mu[i + 1] };
                if mu[i] < next {
                    return Err(Error::ChainViolation {
                        index: i + 2,
                        values: mu.clone(),
                    });
                }
            }
        }
        Ok(HyperState { dimension, mu })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn mu(&self) -> &[i64] {
        &self.mu
    }

    /// The orbital quantum number mu_1.
    pub fn l(&self) -> i64 {
        self.mu[0]
    }

    /// The azimuthal quantum number mu_(D-1).
    pub fn m(&self) -> i64 {
        *self.mu.last().unwrap()
    }

    /// mu_(j+1) with the absolute value applied at the last level, which is
    /// the value every density formula actually uses (1-based j).
    fn mu_effective(&self, j: usize) -> i64 {
        if j == self.dimension - 2 {
            self.mu[j].abs()
        } else {
            self.mu[j]
        }
    }

    /// Every valid state of the given dimension with l up to `l_max`
    /// (for D = 2: every m with |m| <= l_max), in a fixed deterministic order.
    pub fn enumerate(dimension: usize, l_max: i64) -> Vec<HyperState> {
        let mut out = Vec::new();
        if dimension < 2 {
            return out;
        }
        if dimension == 2 {
            for m in -l_max..=l_max {
                out.push(HyperState {
                    dimension,
                    mu: vec![m],
                });
            }
            return out;
        }
        let mut chain = Vec::with_capacity(dimension - 1);
        fn descend(dimension: usize, bound: i64, chain: &mut Vec<i64>, out: &mut Vec<HyperState>) {
            if chain.len() == dimension - 2 {
                for m in -bound..=bound {
                    chain.push(m);
                    out.push(HyperState {
                        dimension,
                        mu: chain.clone(),
                    });
                    chain.pop();
                }
                return;
            }
            for v in 0..=bound {
                chain.push(v);
                descend(dimension, v, chain, out);
                chain.pop();
            }
        }
        for l in 0..=l_max {
            chain.push(l);
            descend(dimension, l, &mut chain, &mut out);
            chain.pop();
        }
        out
    }

    /// The one-dimensional Gegenbauer factors of the density, one per polar
    /// angle; empty for D = 2 where the density is uniform on the circle.
    pub fn factorize(&self) -> Vec<DensityFactor> {
        let d = self.dimension;
        (1..=d.saturating_sub(2))
            .map(|j| {
                let alpha = (d - j - 1) as f64 / 2.0;
                let mu_next = self.mu_effective(j);
                let degree = (self.mu[j - 1] - mu_next) as usize;
                DensityFactor {
                    index: j,
                    degree,
                    lambda: alpha + mu_next as f64,
                    sin_power: 2 * mu_next as u32,
                }
            })
            .collect()
    }
}

impl fmt::Display for HyperState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.dimension)?;
        for (i, m) in self.mu.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for HyperState {
    type Err = Error;

    /// Parses the literal form "D:mu1,mu2,...,m", e.g. "3:2,1" or "5:4,3,2,1".
    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::ParseState {
            literal: s.to_string(),
            reason: reason.to_string(),
        };
        let (dim, rest) = s.split_once(':').ok_or_else(|| err("missing ':'"))?;
        let dimension: usize = dim
            .trim()
            .parse()
            .map_err(|_| err("dimension is not an integer"))?;
        let mu = rest
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| err("quantum numbers must be integers"))?;
        HyperState::new(dimension, mu)
    }
}

/// One factor of the factorized density: the polar angle theta_j carries
/// [C_hat_degree^lambda(cos theta)]^2 (sin theta)^sin_power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityFactor {
    /// 1-based angle index j.
    pub index: usize,
    /// Polynomial degree mu_j - mu_(j+1).
    pub degree: usize,
    /// Gegenbauer parameter alpha_j + mu_(j+1).
    pub lambda: f64,
    /// Twice the effective mu_(j+1).
    pub sin_power: u32,
}

impl DensityFactor {
    /// alpha_j = (D - j - 1)/2, recovered from lambda and sin_power.
    pub fn alpha(&self) -> f64 {
        self.lambda - f64::from(self.sin_power) / 2.0
    }

    /// Effective mu_(j+1) (non-negative).
    pub fn mu_next(&self) -> u32 {
        self.sin_power / 2
    }

    pub(crate) fn evaluator(&self) -> GegenbauerEval {
        GegenbauerEval::new(
            PolySpec::new(self.degree, self.lambda).expect("factor lambda is positive"),
        )
    }
}

/// Angular coordinates on the sphere: theta_j in [0, pi] for the polar
/// angles and theta_(D-1) in [0, 2 pi) for the azimuthal one.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleVector {
    thetas: Vec<f64>,
}

impl AngleVector {
    pub fn new(thetas: Vec<f64>) -> Result<Self> {
        let n = thetas.len();
        for (i, &t) in thetas.iter().enumerate() {
            let ok = if i + 1 == n {
                (0.0..2.0 * std::f64::consts::PI).contains(&t)
            } else {
                (0.0..=std::f64::consts::PI).contains(&t)
            };
            if !ok {
                return Err(Error::AngleOutOfRange { index: i + 1, value: t });
            }
        }
        Ok(AngleVector { thetas })
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }
}

/// Probability density of the state at the given angles.
///
/// This is the squared harmonic itself; the solid-angle weight
/// (sin theta_j)^(2 alpha_j) belongs to the measure and is not included.
pub fn density_eval(state: &HyperState, angles: &AngleVector) -> Result<f64> {
    if angles.thetas.len() != state.dimension - 1 {
        return Err(Error::domain(format!(
            "expected {} angles for dimension {}, got {}",
            state.dimension - 1,
            state.dimension,
            angles.thetas.len()
        )));
    }
    let mut rho = 1.0 / (2.0 * std::f64::consts::PI);
    for factor in state.factorize() {
        let theta = angles.thetas[factor.index - 1];
        let poly = factor.evaluator().eval(theta.cos());
        rho *= poly * poly * theta.sin().powi(factor.sin_power as i32);
    }
    Ok(rho)
}
