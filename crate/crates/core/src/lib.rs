//! Heterodyne-based estimation, tomography and verification of
//! continuous-variable quantum states on truncated Fock spaces.
//!
//! The crate is `no_std` compatible (it needs `alloc`). Disable the default
//! `std` feature to build without the standard library.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod estimator;
pub mod fock;
pub mod math;
pub mod oracle;
pub mod protocol;
pub mod random;
pub mod sampling;
pub mod special;
pub mod tomography;

pub use error::{Error, Result};
pub use estimator::EstimatorConfig;
pub use fock::{CutoffPolicy, DensityMatrix, FockOperator, FockVector};
pub use num_complex::Complex64;
pub use sampling::HeterodyneSample;
