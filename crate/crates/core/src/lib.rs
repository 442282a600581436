//! capq-core: a finite-dimensional quantum channel laboratory.
//!
//! - [`linmath`]: dense complex matrices, Hermitian eigensolver, entropy.
//! - [`channels`]: Kraus channels, Choi and Stinespring forms, complements.
//! - [`capacity`]: coherent information and restarted one-shot capacity estimates.
//! - [`directsum`]: the flagged projective direct sum of two channels.
//! - [`circuits`]: a Clifford+T circuit language compiled to channels, and the
//!   verifier-to-channel reduction built on the direct sum.
//! - [`zeroerr`]: graphs, confusability Gram vectors, the associated c-q channel
//!   and certified zero-error capacity bounds.
//! - [`selftest`]: the acceptance checks, runnable from the library.

pub mod capacity;
pub mod channels;
pub mod circuits;
pub mod directsum;
pub mod error;
pub mod linmath;
pub mod selftest;
pub mod zeroerr;

pub use error::{Error, Result};
