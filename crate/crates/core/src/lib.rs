//! Subshift distances, periodic-approximant spectra and Hölder spectral
//! certificates for pattern-equivariant lattice Hamiltonians.
//!
//! The crate is `no_std` with `alloc`. Everything that touches files, the
//! command line or threads lives in the `aperispec` companion crate; the only
//! hook for parallelism here is the [`Executor`] trait.

#![no_std]

extern crate alloc;

pub mod bounds;
mod error;
mod exec;
pub mod lattice;
pub mod linalg;
pub mod operators;
pub mod spectra;
pub mod symbolic;

pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use lattice::{Lattice, LatticePoint};
