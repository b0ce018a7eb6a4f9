//! Unitary matrix triangularizations and MIMO multicast transmission.
//!
//! The crate is organized in four layers:
//!
//! - [`linalg`]: complex dense kernels (QR, one-sided Jacobi SVD, Hermitian
//!   square root, Hermitian eigendecomposition) with explicit phase
//!   conventions (triangular/diagonal factors carry real non-negative
//!   diagonals).
//! - [`decomp`]: the geometric mean decomposition (GMD), joint
//!   equi-diagonal triangularization (JET) of two matrices, and the staged
//!   space-time joint triangularization of K matrices over N channel uses.
//! - [`scheme`]: MMSE channel augmentation, precoding and receiver front
//!   end, successive interference cancellation, and a Monte-Carlo
//!   simulator that measures per-stream SINR against prediction.
//! - [`capacity`]: mutual information, compound (multicast) channel
//!   capacity via projected supergradient ascent, single-stream
//!   beamforming and time-sharing baselines, and the channel-use
//!   bookkeeping for given capacity fractions.

pub mod capacity;
pub mod decomp;
pub mod error;
pub mod linalg;
pub mod random;
pub mod scheme;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Tolerance};
