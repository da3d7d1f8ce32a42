//! Two-mode cavity quantum optics on a truncated Fock space.
//!
//! The pipeline follows a Raman-pumped two-mode cavity: the pump channel
//! drives the field to a steady state, which acts on coherent inputs as a
//! quantum beam splitter. At the 50/50 tuning the two output marginals of
//! any coherent-state mixture coincide (broadcasting), and strong
//! attenuation maps mixtures into the vacuum/one-photon subspace where an
//! unambiguous-discrimination POVM can separate them.

pub mod beamsplitter;
pub mod broadcast;
pub mod cavity;
pub mod discrimination;
pub mod error;
pub mod exec;
pub mod fock;
pub mod linalg;

pub use error::{Error, Result};
pub use exec::Exec;
pub use num_complex::Complex64;
