#![no_std]

extern crate alloc;

pub mod contraction;
pub mod discord;
pub mod error;
pub mod estimator;
pub mod linalg;
pub mod pairing;
pub mod rng;
pub mod simplex;
pub mod state;
pub mod tomography;

#[cfg(test)]
mod proptests;

pub use discord::{gqd_by_minimization, gqd_exact, k_matrix, GqdValue, KMatrix, Side};
pub use error::{Error, Result};
pub use state::{decompose, make_family, random_state, BlochForm, Family, TwoQubitState};
