//! Hamming-cube calculus and numerical certificates for L¹-Poincaré constants.
//!
//! Functions on `{-1,1}^n` are stored as dense `2^n` tables indexed by a
//! vertex mask: bit `i` is set iff `x_i = -1`. Everything here needs only
//! `alloc`; IO and parallelism live in the `cubelab` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod asymptotics;
pub mod binomial;
pub mod checks;
pub mod constants;
pub mod cube;
pub mod dualnorm;
pub mod error;
pub mod kernel;
pub mod khintchine;
pub mod profile;
pub mod sphere;

pub use cube::{CubeFunction, VectorField, WalshSpectrum};
pub use error::{Error, Result};
pub use kernel::{kernel_table, KernelTable};
pub use sphere::SphereVector;
