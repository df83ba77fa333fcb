//! Length spectra of geometric primes — closed-geodesic norms for the modular
//! group, congruence subgroups, quaternion-unit lattices, and finite metric
//! graphs — together with their gap statistics.
//!
//! The central objects are ascending sequences of norms `N(c) = e^{l(c)}` and
//! their limit-gap behavior: adjacent gaps of the modular spectrum tend to 1
//! from above, congruence progressions have gaps tending to `N⁴`, rational
//! metric graphs have diverging gaps, and the two-loop bouquet admits length
//! parameters with certified arbitrarily small gaps.

pub mod arithmetic_subgroups;
pub mod bouquet_liouville;
pub mod error;
pub mod gap_sequences;
pub mod metric_graph;
pub mod modular_spectrum;
pub mod precision;
pub mod quadratic_orders;

pub use error::{Error, Result};
