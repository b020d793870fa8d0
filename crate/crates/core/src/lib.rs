//! Simulation and analysis of oblivious transfer over noisy point-to-point
//! and two-sender multiple-access channels.

pub mod bounds;
pub mod capacity;
pub mod channels;
pub mod error;
pub mod hashing;
pub mod info;
pub mod prob;
pub mod protocol;
pub mod seceval;
pub mod typicality;

pub use error::{Error, Result};
pub use prob::{BitString, Distribution, JointDistribution, SeededRng};
