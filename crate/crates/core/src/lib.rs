//! Entanglement bookkeeping for a qubit that leaks its excitation into a
//! partner system while staying entangled with a static, non-interacting
//! background party (the "Moon").
//!
//! The crate is split along the lines of the computation:
//!
//! * [`schmidt`] builds bipartite coefficient matrices for the three-party
//!   state, diagonalizes reduced densities and evaluates Schmidt weights,
//!   including the closed forms shared by every amplitude-flow channel.
//! * [`channels`] generates the time-dependent amplitudes for spontaneous
//!   emission, the resonant Jaynes–Cummings model and an XY spin chain.
//! * [`oracle`] is an independent brute-force path: explicit Hamiltonians,
//!   exact eigendecomposition evolution and numerical partial traces.
//! * [`invariants`] evaluates the restriction and conservation relations.
//! * [`scenario`] runs configured trajectories and writes CSV/JSON output
//!   for the `afl` command-line tool.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod error;
pub mod invariants;
pub mod linalg;
pub mod oracle;
pub mod scenario;
pub mod schmidt;

pub use error::{Error, Result};
