//! Gelfand-Tsetlin patterns for the orthogonal groups and the particle
//! dynamics living on them.

pub mod dynamics;
pub mod error;
pub mod gt;
pub mod harness;
pub mod kernels;
pub mod law;
pub mod scalar;
pub mod spectra;

pub use error::{Error, Result};
pub use gt::{count_patterns, enumerate_patterns, interlaces, pattern_is_valid, weyl_dimension, Pattern, Row};
pub use law::SparseLaw;
pub use scalar::{JumpParam, QValue, Scalar};
