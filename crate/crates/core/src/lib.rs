//! Analytic theory, exact-in-law simulation and ensemble estimators for
//! fractional Brownian motion (FBM), Riemann-Liouville FBM and their
//! extensions with a random Hurst exponent.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the experiment
//! runner and the command line live in the companion `fbmre` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod error;
pub mod estimate;
pub mod hurst;
pub mod oracle;
pub mod quad;
pub mod randomized;
pub mod simulate;
pub mod specfun;

pub use error::{Error, Result};
pub use hurst::{Hurst, HurstModel, Tabulated, TwoPoint};
pub use analytic::{IncrementForm, ProcessKind, Regime};
pub use estimate::{CurvePoint, StatCurve};
pub use randomized::{MixtureStat, ProcessSpec, Stat};
pub use simulate::{Ensemble, TimeGrid, Trajectory};
