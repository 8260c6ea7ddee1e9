//! Frequency-wise stability certificates for square MIMO LTI feedback loops.
//!
//! Two stable systems `H1`, `H2` are connected in negative feedback
//! (`e = u - H2 y`, `y = H1 e`). At each frequency the scaled relative graph
//! (SRG) of `H1(j omega)` is inverted and checked for separation from
//! `-tau SRG(H2(j omega))` for every `tau` in `(0, 1]`; strict separation at
//! all frequencies certifies closed-loop stability. The crate also carries
//! the classical comparators (determinant locus, winding number, generalized
//! Nyquist criterion and its sufficient form) and an eigenvalue oracle used
//! to cross-check every verdict.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod nyquist;
pub mod oracle;
pub mod perf;
pub mod plot;
pub mod ratfun;
pub mod separation;
mod serde_util;
pub mod srg;

pub use error::{Error, Result};
pub use num_complex::Complex64;
