//! Macroscopicity measures for multipartite spin states.

extern crate openblas_src;

pub mod cli;
pub mod error;
pub mod isingqpt;
pub mod linalg;
pub mod lindblad;
pub mod macromeasure;
pub mod numfmt;
pub mod phasespace;
pub mod quad;
pub mod rng;
pub mod spincore;

pub use error::{Error, Result};
