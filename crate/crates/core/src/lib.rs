//! Cluster expansion of the canonical partition function of a classical gas
//! with pair interactions in a periodic box.
//!
//! The crate is layered bottom-up:
//!
//! * [`graph`] labeled simple graphs, enumeration, blocks, signed sums;
//! * [`polymer`] abstract polymer systems and their cluster coefficients;
//! * [`potential`] pair potentials, periodization and Mayer functions;
//! * [`integrals`] graph activities and Mayer coefficients;
//! * [`expansion`] the free-energy coefficients and virial series;
//! * [`oracle`] brute-force partition functions and exact hard-rod formulas.
//!
//! [`config`] reads run configurations and polymer-system files.

pub mod config;
pub mod error;
pub mod estimate;
pub mod expansion;
pub mod graph;
pub mod integrals;
pub mod oracle;
pub mod polymer;
pub mod potential;
pub mod quadrature;
pub mod series;

pub use error::{Error, Result};
