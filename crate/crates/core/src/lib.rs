//! Painleve V transcendents generated from k-th order supersymmetric partners
//! of the radial oscillator.
//!
//! Pipeline: seed chain -> extremal quartet -> ordering -> g(x) -> w(z) ->
//! PV parameters, with every output certified by the PV residual.

pub mod error;
pub mod hierarchies;
pub mod ladder_algebra;
pub mod painleve;
pub mod seed_solutions;
pub mod special_functions;
pub mod susy_engine;
pub mod tables;
pub mod taylor;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
