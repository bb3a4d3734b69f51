//! Decoherence-free subspaces as wiretap codes over collective-noise quantum channels.
//!
//! The crate models a channel by its Kraus operators and a minimal unitary
//! dilation, so the legitimate receiver (the system output) and the wiretapper
//! (the full environment) can both be evaluated. On top of that it finds
//! decoherence-free subspaces, builds error-avoiding codes over them, verifies
//! the wiretap-code criteria and maximises Holevo quantities over input priors.

pub mod capacity;
pub mod channel;
pub mod cli;
pub mod dfs;
pub mod error;
pub mod linalg;
pub mod secrecy;

pub use error::{Error, Result};
