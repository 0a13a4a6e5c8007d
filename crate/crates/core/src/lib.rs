//! Locally differentially private estimation of functionals.
//!
//! The crate is organised bottom-up:
//!
//! * [`channels`]: privacy levels, the binary channel, finite channels,
//!   distributions on finite supports and the distances between them.
//! * [`representers`]: bounded functions fed to the binary channel, their
//!   bias/sup-norm families, polynomial kernels and bandwidth selection.
//! * [`estimators`]: projected sample mean, binary search estimator and its
//!   affine surrogate.
//! * [`moduli`]: closed-form and brute-force moduli of continuity, the
//!   lower-bound curve and inequality checks.
//! * [`models`]: data generating models, worst-case pairs and loss functions.
//! * [`harness`]: Monte Carlo risk experiments, rate fitting and persistence.

pub mod channels;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod models;
pub mod moduli;
pub mod numeric;
pub mod random;
pub mod representers;
pub mod rng;
pub mod suite;

pub use error::{Error, Result};
