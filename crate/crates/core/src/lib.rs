//! Relevant-difference tests for spectral density operators of functional
//! time series.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod fts;
pub mod seed;
pub mod spectral;
pub mod eigen;
pub mod pivot;
pub mod relevance;
pub mod simlab;

pub use error::{Error, Result};
