//! Pattern-based validation rules for string columns.
//!
//! A corpus of existing columns is scanned once into a compact index that
//! records, for every pattern seen, how many columns it covers and how impure
//! those columns are with respect to it. A query column is then matched to
//! the pattern with the lowest expected false-positive rate, and later
//! snapshots are checked for a significant change in their non-conforming
//! fraction.

pub mod pattern;
pub mod index;
pub mod solver;
pub mod stats;
pub mod rule;
pub mod drift;
pub mod bench;
