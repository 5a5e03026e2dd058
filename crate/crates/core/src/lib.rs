//! Numerical construction and verification of a four-dimensional body of
//! constant width assembled from Steiner-chain envelopes over a focal
//! 2-skeleton of a regular simplex.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod body;
pub mod cli;
pub mod error;
pub mod export;
pub mod focal;
pub mod geometry;
pub mod numerics;
pub mod skeleton;
pub mod slice;
pub mod verify;

pub use error::{Error, Result};
