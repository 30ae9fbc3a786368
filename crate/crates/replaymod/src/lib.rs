//! IO, corpus generation, evaluation and the command line for
//! `replaymod-core`.

mod atomic;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod formats;
pub mod wav;

pub use atomic::write_atomic;
pub use error::{Error, Result};
