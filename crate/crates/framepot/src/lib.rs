//! File formats, threaded sampling and the command-line driver for
//! [`framepot_core`].

pub mod circuit_text;
pub mod cli;
pub mod config;
pub mod error;
pub mod parallel;
pub mod pipeline;
pub mod store_file;
pub mod tables;
pub mod validate;

pub use error::{Error, Result};
