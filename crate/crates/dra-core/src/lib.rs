//! Discriminant residual analysis (DRA) for image-set classification.
//!
//! An image set is a group of feature vectors sharing one class label and
//! classified as a unit. Classification regresses the probe set jointly
//! against a *related* group (the candidate class) and an *unrelated* group
//! (everything else), and compares the two regression residuals. DRA learns
//! a projection of the residual space that makes the related/unrelated
//! distance ratio more discriminative.
//!
//! Crate layout:
//! * [`linalg`] — dense symmetric kernels: Cholesky, Jacobi eigendecomposition,
//!   symmetric-definite GEVD, matrix exponential, ridge regression, PCA.
//! * [`setcore`] — labeled image sets, the difference-form transform,
//!   unrelated-group construction (NFS and Euclidean selection), random splits.
//! * [`residual`] — joint difference-form regressions, residual distances and
//!   the unprojected ratio classifier.
//! * [`dra`] — residual banks over training x validation pairs, PE/TE scatter
//!   assembly, regularized projection learning, the projected classifier and
//!   the PCA-reduced variant.
//! * [`harness`] — synthetic data, CSV ingestion, the repeated-random-split
//!   experiment protocol and report emission.

pub mod dra;
mod error;
pub mod harness;
pub mod linalg;
pub mod residual;
pub mod setcore;

pub use error::{Error, Result};
