//! Numerical laboratory for quantum one-time pads.
//!
//! A bipartite quantum state shared between a sender and a receiver can be
//! spent as a one-time-pad key: the sender encodes by applying one of an
//! ensemble of operations to her half, under the constraint that her
//! marginal never changes (so an eavesdropper holding that half alone learns
//! nothing). This crate computes how much can be sent that way — the
//! quantum mutual information of the key — synthesizes the scrambling
//! ensembles that realize it, and verifies the surrounding bound ladder
//! numerically:
//!
//! - [`matcore`]: dense complex matrices, tensor products, partial traces,
//!   Hermitian eigen-decomposition.
//! - [`states`]: validated density operators, bipartite states, conditional
//!   block operators.
//! - [`functionals`]: von Neumann entropy, Holevo quantity, mutual and
//!   coherent information (bits throughout).
//! - [`scramble`]: eigenvalue-block decomposition of the A marginal, the
//!   discrete Weyl scrambling family, twirl channels and their closed form.
//! - [`bounds`]: the capacity report, the relaxed-privacy leakage bound,
//!   type-class counting and asymptotic rate schedules.
//! - [`classical`]: joint PMFs and the diagonal embedding that reduces the
//!   classical problem to the quantum machinery.
//! - [`statefile`]: the on-disk state format used by the CLI.
//! - [`sampling`]: reproducible random states, unitaries and channels.

pub mod bounds;
pub mod classical;
pub mod error;
pub mod functionals;
pub mod matcore;
pub mod sampling;
pub mod scramble;
pub mod statefile;
pub mod states;
pub mod tol;

pub use error::{Error, Result};
