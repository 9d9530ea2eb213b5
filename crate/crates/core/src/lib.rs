//! Uniformity testing over hypergrids with subcube conditional samples, plus
//! exact numerical checks of the Fourier machinery behind it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distribution;
pub mod edges;
pub mod error;
pub mod exact;
pub mod fourier;
pub mod grid;
pub mod harness;
pub mod oracle;
pub mod pisier;
pub mod report;
pub mod tensor;
pub mod testers;

pub use distribution::{BiasVector, Distribution};
pub use error::{Error, Result};
pub use grid::{GridShape, Point, Restriction};
pub use report::VerificationReport;
