//! Verification toolkit for the algebraic Bethe ansatz of the gl(2)-invariant
//! (rational, XXX) inhomogeneous spin-1/2 chain with a twisted boundary.
//!
//! The crate builds the chain's monodromy matrix `T(u) = [[A, B], [C, D]]` as
//! explicit linear operators on the 2^L-dimensional chain space, applies
//! unimodular twists to it, solves the Bethe equations numerically, and checks
//! the whole web of operator identities that the twisted Bethe vectors
//! `B̃(u_1)…B̃(u_n)|0⟩` satisfy:
//!
//! * the RTT exchange relation and commuting transfer matrices,
//! * twisted-entry expansions and trace preservation under `T ↦ κTκ⁻¹`,
//! * vacuum and off-shell action formulas for the twisted entries,
//! * partition-sum expansions of `A(z)`, `D(z)`, `C(z)` acting on Bethe
//!   vectors, and of twisted `B̃`-products over ordinary `B`-products,
//! * the on-shell collapse of the twisted product to `κ₁₁^{2n} B(ū)|0⟩`,
//! * the four operator contributions that assemble the expansion inductively,
//! * scalar partial-fraction and binomial partition lemmas underlying all of
//!   the above.
//!
//! Everything runs in one of two scalar modes: **exact** (arbitrary-precision
//! rationals; identities must hold with residual exactly zero) or **float**
//! (complex `f64`; residuals compared against tight tolerances). The two modes
//! never mix inside a computation.
//!
//! The library surface is organized by layer: [`scalar`] and [`kernel`] hold
//! the dual-mode arithmetic, parameter sets, partitions, and scalar
//! identities; [`linalg`] the dense operators; [`chain`] the model and
//! monodromy; [`twist`], [`bethe`], [`expansion`] the operator-level checks;
//! [`config`], [`report`], [`suite`] the runnable verification suite behind
//! the `bethe-twist` binary. The `examples/` directory exercises each layer.

pub mod bethe;
pub mod chain;
pub mod config;
pub mod error;
pub mod expansion;
pub mod kernel;
pub mod linalg;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod suite;
pub mod twist;

pub use error::{Error, Result};
pub use scalar::{Mode, Scalar};
