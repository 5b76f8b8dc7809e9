//! Orbits of Fuchsian groups in SL(2,ℝ) representations and their limit
//! measures.
//!
//! The crate is organized bottom-up: [`sl2`] and [`rep`] provide the group
//! and representation algebra, [`orbits`] enumerates norm balls of a group,
//! [`boundary`] builds boundary measures from orbit data, [`limits`]
//! evaluates empirical sums and limit integrals, and [`trig`] contains the
//! Fejér approximation machinery.

pub mod boundary;
pub mod error;
pub mod limits;
pub mod numeric;
pub mod orbits;
pub mod rep;
pub mod sl2;
pub mod trig;

pub use error::{Error, Result};
pub use rep::{build_irrep, build_rep, op_norm, EndV, Irrep, RepSpace};
pub use sl2::{hyp_dist, kak_compose, kak_decompose, mobius_act, CartanCoords, HPoint, IntMat2, Mat2};
