//! Numerical laboratory for frames represented as orbits and suborbits of
//! bounded operators on ℓ²(ℕ).
//!
//! Every infinite-dimensional object is modelled at finite scale: vectors have
//! finite support ([`seqspace::SeqVec`]), operators act exactly on such vectors
//! ([`seqspace::OperatorSpec`]), and frames are finite families analysed through
//! their synthesis matrices ([`frames::Frame`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approxrep;
pub mod builtins;
pub mod carleson;
pub mod cli;
pub mod error;
pub mod frames;
pub mod hypercyclic;
pub mod linalg;
pub mod orbitrep;
pub mod seqspace;

pub use error::{Error, Result};
pub use frames::{Frame, FrameBounds};
pub use seqspace::{OperatorSpec, SeqVec};
