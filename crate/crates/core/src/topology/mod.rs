//! Degeneracy geometry on the torus and the sheet invariants built on it.

pub mod braid;
pub mod contours;
pub mod eps;
pub mod invariants;

pub use braid::{braid_word, BraidWord};
pub use contours::{degeneracy_contours, ContourKind, DegeneracyContour};
pub use eps::{locate_eps, winding_number, EpCensus, EpSearchOptions, ExceptionalPoint};
pub use invariants::{classify, excitation_type_count, invariants, Classification, InvariantReport};
