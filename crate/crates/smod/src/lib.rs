//! Numerical study of the perturbation gap sup_{||z|| <= a} | ||x+z|| -
//! ||y+z|| | on finite-dimensional normed spaces: estimation, explicit
//! witness constructions, a brute-force certification oracle, and parameter
//! sweeps.

pub mod error;
pub mod modulus;
pub mod report;
pub mod space;
pub mod srenorm;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
pub use modulus::{
    ascent, brute_force_oracle, inner_sup, inner_sup_p, outer_inf, p_sandwich, Direction, Method,
    ModulusEstimate, PairSample,
};
pub use space::{BochnerVector, SpaceSpec, Vector};
