//! Exact calculator for Lagrangian matching invariants of broken fibrations.

pub mod cli;
pub mod error;
pub mod exterior;
pub mod spinc;
pub mod symprod;
pub mod tqft;

pub use error::{Error, Result};
