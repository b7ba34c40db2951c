//! Entropy and complexity measures of the probability densities attached to
//! hyperspherical harmonics, the eigenstates of the D-dimensional rigid
//! rotator.
//!
//! Entropic moments are computed along two independent routes that check
//! each other: an exact linearization of even Gegenbauer powers
//! ([`linearization`]) for integer moment orders, and weighted Gauss
//! quadrature ([`entropies`]) for arbitrary real orders. On top of those
//! sit the Shannon entropy, the closed-form Fisher information and the
//! Fisher-Shannon, Fisher-Renyi and LMC complexity measures
//! ([`measures`]). A catalog of independently derived closed forms plus a
//! brute-force integrator ([`oracle`]) audits everything, and [`cli`]
//! exposes reports, figure sweeps and the validation suite.

pub mod cli;
pub mod entropies;
mod error;
pub mod linearization;
pub mod measures;
pub mod oracle;
pub mod quad;
pub mod special;
pub mod state;

pub use error::{Error, Result};
pub use state::{density_eval, AngleVector, DensityFactor, HyperState};
