//! Sparse principal component analysis for the high-dimension, low-sample-size
//! (HDLSS) regime.
//!
//! The crate is organized bottom-up:
//!
//! * [`spectral`]: Jacobi eigendecomposition of small symmetric matrices and the
//!   dual (n x n) route to the leading sample eigenvector of a d x n data matrix.
//! * [`model`]: the single-spike covariance model with a sparse leading
//!   eigenvector, its Gaussian sampler, and a discrete non-Gaussian sampler.
//! * [`estimators`]: conventional PCA, simple thresholding, the iterative
//!   regularized sparse PCA (RSPCA) algorithm and the oracle subspace estimator.
//! * [`selection`]: BIC selection of the thresholding parameter, angle and
//!   support-recovery metrics, threshold-range bounds and rate fitting.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod estimators;
pub mod model;
pub mod selection;
pub mod spectral;

pub use data::{DataMatrix, LoadingVector, Provenance};
pub use error::{Result, SpcaError};
