//! Blind prediction of stationary circularly symmetric Gaussian processes.
//!
//! Given a finite noisy window of a stationary process, this crate predicts
//! the next window two ways:
//!
//! * an exact linear MMSE baseline that knows the true power spectral
//!   distribution ([`mmse`]), and
//! * a blind pipeline that quantizes the spectrum of the observation by
//!   atomic-norm denoising and extrapolates the recovered atoms
//!   ([`atomic`] + [`quantizer`]).
//!
//! [`spectrum`] models mixed discrete/continuous power spectral
//! distributions, [`sampler`] draws exact realizations from them, and
//! [`experiments`] is the Monte Carlo harness that compares the two
//! predictors.

pub mod atomic;
pub mod experiments;
pub mod linalg;
pub mod mmse;
pub mod quantizer;
pub mod sampler;
pub mod spectrum;

mod dd;
mod error;
mod poly;

pub use error::{Error, Result};

pub use num_complex::Complex64;
