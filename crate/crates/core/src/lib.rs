//! Topology of the complex-eigenvalue Riemann surfaces of non-Hermitian
//! Bloch Hamiltonians over the Brillouin-zone torus.
//!
//! Exceptional points carry half-integer winding charges. Sheet monodromy
//! along the two non-contractible loops gives the `Z2 x Z2` (and multi-band)
//! invariants that label fully non-degenerate spectra.

pub mod error;
pub mod io;
pub mod model;
pub mod permutation;
pub mod scan;
pub mod spectral;
pub mod surface;
pub mod topology;

pub use error::{Error, ErrorCategory, Result};
pub use model::{BlochModel, Builtin, CMatrix, HoppingTerm, Lifted, MomentumPoint};
pub use permutation::Permutation;
pub use spectral::{Axis, EigenSet, LoopOptions, SheetPath, TrackOptions};
pub use topology::{
    braid_word, classify, degeneracy_contours, excitation_type_count, invariants, locate_eps, winding_number,
    BraidWord, Classification, ContourKind, DegeneracyContour, EpCensus, ExceptionalPoint, InvariantReport,
};
