//! Numerical core for experiments on random-isometry quantum channels.
//!
//! The crate provides dense complex linear algebra over composite registers
//! ([`tensor`]), Stinespring-form channels built from Haar-random unitaries
//! ([`channel`]), Renyi/von Neumann entropy functionals and a multi-start
//! minimum-output-entropy estimator ([`entropy`]), closed-form bound
//! evaluators ([`bounds`]), and exact fourth-moment averages over the unitary
//! group via the Weingarten function ([`weingarten`]).
//!
//! Everything is `no_std` + `alloc`; IO, file formats and the CLI live in the
//! companion `renyi-lab` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod channel;
pub mod entropy;
pub mod error;
pub mod tensor;
pub mod weingarten;

pub use error::{CoreError, CoreResult};
