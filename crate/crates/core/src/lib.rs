#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod error;
pub mod models;
pub mod pk;
pub mod quad;
pub mod sim;
pub mod special;
pub mod stats;
pub mod transforms;
pub mod validation;

pub use error::{Error, Result};
