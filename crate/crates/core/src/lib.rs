#![allow(
    clippy::needless_range_loop,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::type_complexity
)]

pub mod cli;
pub mod curving;
pub mod error;
pub mod euler;
pub mod mesh;
pub mod operators;
pub mod refelem;
pub mod solver;

pub use error::{Error, Result};
