//! Computable Lorentzian measure theory on finite and Minkowski spaces.
//!
//! The crate models Lorentzian pre-length spaces, estimates Hausdorff-type
//! measures built from causal diamonds by exact and greedy set covers,
//! evaluates causal weighted integrals as covering linear programs, and
//! checks coarea-type inequalities at fixed covering scales.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod backends;
pub mod covering;
pub mod curves;
pub mod error;
pub mod harness;
pub mod ext_real;
pub mod integration;
pub mod lp;
pub mod maps;
pub mod measure;
pub mod relation;
pub mod setcover;
pub mod space;

pub use error::{Error, Result};
