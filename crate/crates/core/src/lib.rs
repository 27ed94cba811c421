//! Monte Carlo reflecting Brownian motion on planar and product domains, with
//! box-counting estimates of the dimensions of boundary occupation times,
//! boundary traces, path images and their subordinated (stable-like) analogues.

pub mod error;
pub mod fracdim;
pub mod geometry;
pub mod harness;
pub mod rbm;
pub mod rng;
pub mod subordination;
pub mod timeset;

pub use error::{Error, Result};
