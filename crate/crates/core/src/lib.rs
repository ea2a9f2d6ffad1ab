//! Rényi entropy rates of finite-alphabet processes, Markov approximations,
//! and an exact cutting-and-stacking toolkit for building stationary ergodic
//! processes whose Rényi and Shannon rates differ.

pub mod approx;
pub mod counterexample;
pub mod cutstack;
pub mod entropy;
pub mod error;
pub mod fit;
pub mod processes;
pub mod rational;
pub mod spectral;

pub use error::{Error, Result};
