//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors raised by construction, validation and simulation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A mode label (rail name, polarization) was registered twice.
    RegistryConflict(String),
    /// A rail or mode was referenced that does not exist in the registry.
    UnknownRail(String),
    /// A mode index appeared more than once in a unitary application.
    RepeatedMode(usize),
    /// A matrix failed the unitarity check; carries the max deviation found.
    NonUnitary(f64),
    /// A parameter was outside its documented range, or inputs were
    /// structurally inconsistent.
    InvalidArgument(String),
    /// `normalize` was called on the zero vector.
    DegenerateState,
    /// A state construction exceeded the configured total photon cap.
    PhotonCapExceeded { total: u32, cap: u32 },
    /// A gate blueprint failed its construction-time contract check, or a
    /// heralded output left the qubit subspace. Carries a diagnostic.
    ContractViolation(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::RegistryConflict(label) => write!(f, "duplicate mode label: {label}"),
            Error::UnknownRail(name) => write!(f, "unknown rail or mode: {name}"),
            Error::RepeatedMode(idx) => write!(f, "mode index {idx} repeated"),
            Error::NonUnitary(dev) => {
                write!(f, "matrix is not unitary (max deviation {dev:.3e})")
            }
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::DegenerateState => write!(f, "cannot normalize a zero-norm state"),
            Error::PhotonCapExceeded { total, cap } => {
                write!(f, "total photon number {total} exceeds cap {cap}")
            }
            Error::ContractViolation(msg) => write!(f, "gate contract violation: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
