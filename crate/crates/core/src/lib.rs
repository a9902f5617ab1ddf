//! Executable random expansivity: bundle random dynamical systems, random Bowen balls and
//! Γ sets, expansivity diagnostics against disintegrated measures, fiber entropy, and
//! invariant measures built by pullback Cesàro averaging.

pub mod base;
pub mod disintegration;
pub mod error;
pub mod exact;
pub mod fiber;
pub mod gamma;
pub mod invariant;
pub mod measure;
pub mod scenario;
pub mod stats;
pub mod entropy;
pub mod expansivity;

pub use error::{Error, Result};
