// NaN has to fail the tolerance checks, hence `!(x < tol)` rather than `x >= tol`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod autodiff;
pub mod branch;
pub mod builtins;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod model;
pub mod pipeline;
pub mod reduction;
pub mod report;
pub mod system;
pub mod topology;
pub mod velocity;

pub use error::{Error, Result};
