#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Simulation toolkit for supervisory switched control systems.

pub mod bounds;
pub mod cases;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod par;
pub mod sim;
pub mod supervisor;
pub mod system;

pub use error::{Error, Result};
