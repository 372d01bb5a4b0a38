//! Classical simulation of qubit channels with finite communication.
//!
//! The crate evaluates exact and sampled simulation protocols for
//! measurements on prepare-and-measure scenarios, decomposes measurements into
//! extremal rank-one parts, collapses interactive protocols to one round,
//! estimates depolarizing factors of finite-codebook strategies and searches
//! for witnesses that no finite strategy reproduces a target family.

pub mod decompose;
pub mod depolarize;
pub mod error;
mod linalg;
pub mod multiround;
pub mod nogo;
pub mod protocols;
pub mod qmath;

pub use error::{Error, Result};
