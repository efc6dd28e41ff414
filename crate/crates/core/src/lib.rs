// `!(x > 0.0)` style checks are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod collar;
pub mod curvature;
pub mod error;
pub mod geometry;
pub mod harmonic;
pub mod numerics;
pub mod sweep;

pub use error::{Error, Result};
