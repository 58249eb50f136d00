//! Error type shared by all modules of the crate.

use alloc::string::String;
use core::fmt;

/// Errors reported by the numerical core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreError {
    /// A register or matrix dimension is zero or inconsistent.
    InvalidDimension(String),
    /// An argument violates a documented precondition.
    InvalidArgument(String),
    /// A computation would exceed the configured memory cap.
    ResourceLimit(String),
    /// A closed-form formula evaluated to an unusable value (e.g. an empty
    /// subspace).
    InfeasibleParameters(String),
    /// A spectrum is degenerate in a way the requested quantity cannot handle
    /// (top eigenvalue equal to one).
    DegenerateSpectrum(String),
    /// The permutation Gram matrix is singular (`d < n`).
    SingularGram(String),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::InvalidDimension(msg) => write!(f, "invalid dimension: {msg}"),
            CoreError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            CoreError::ResourceLimit(msg) => write!(f, "resource limit exceeded: {msg}"),
            CoreError::InfeasibleParameters(msg) => write!(f, "infeasible parameters: {msg}"),
            CoreError::DegenerateSpectrum(msg) => write!(f, "degenerate spectrum: {msg}"),
            CoreError::SingularGram(msg) => write!(f, "singular Gram matrix: {msg}"),
        }
    }
}

impl core::error::Error for CoreError {}

pub type CoreResult<T> = Result<T, CoreError>;
