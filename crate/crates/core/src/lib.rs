//! Idempotents in the closure of the power orbit of a power-bounded matrix,
//! the reversible/stable decomposition they induce, positivity and cyclicity
//! checks for nonnegative matrices, and exact finite-semigroup structure.
//!
//! Every analysis returns [`report::CheckBlock`]s carrying the residuals it
//! measured together with the thresholds they are judged against.

pub mod battery;
pub mod error;
pub mod fixtures;
pub mod ip;
pub mod jdlg;
pub mod koehler;
pub mod lattice;
pub mod linalg;
pub mod parallel;
pub mod report;
pub mod semigroup;

pub use error::{Error, Result};
