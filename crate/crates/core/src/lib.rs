//! Extracted, residual and destroyed accessible information of quantum
//! measurements on classical-quantum signal ensembles, with four binary
//! coherent-state receivers (homodyne, photon counting, and two atomic
//! Jaynes–Cummings schemes).

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod fock;
pub mod info;
pub mod linalg;
pub mod numerics;
pub mod receivers;

pub use error::{Error, Result};
