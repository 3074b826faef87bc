//! Exact enumeration of dimer clusters on Z^d and the series machinery
//! around it: overlap patterns, tree tallies, connected sums under a
//! pluggable weight, reference tables for the 1/d expansion of λ_d, and
//! independent oracles.

pub mod aggregate;
pub mod display;
pub mod enumerate;
pub mod error;
pub mod lattice;
pub mod oracle;
pub mod pattern;
pub mod precision;
pub mod series;
pub mod verify;
pub mod weight;

pub use error::{Error, Result};
