//! Numerical laboratory for bulk universality of Wigner matrices.
//!
//! Entry laws and matrix ensembles ([`ensemble`]), the Ornstein–Uhlenbeck
//! flow on densities and matrices ([`ou_flow`]), a dense Hermitian
//! eigensolver ([`spectra`]), semicircle and local eigenvalue statistics
//! ([`statistics`]), sine-kernel references ([`fredholm`]) and the
//! contour-integral correlation kernel of Gaussian-divisible ensembles
//! ([`bh_kernel`]). [`montecarlo`] runs seeded replicas in parallel.

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bh_kernel;
pub mod ensemble;
pub mod error;
pub mod fredholm;
pub mod jet;
mod linalg;
pub mod montecarlo;
pub mod ou_flow;
pub mod quadrature;
pub mod rng;
pub mod spectra;
pub mod statistics;

pub use error::{Error, Result};
