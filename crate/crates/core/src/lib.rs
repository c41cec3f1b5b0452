//! Exponential B-spline and totally positive Gabor windows.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod exppoly;
pub mod gramian;
pub mod linalg;
pub mod windows;
pub mod zak;

pub use error::{Error, Result};
