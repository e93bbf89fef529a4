//! Relative equilibria of three point masses on the unit sphere.
//!
//! Collinear (meridian) equilibria live in [`euler`], triangular ones in
//! [`lagrange`]. [`verify`] integrates candidates in time and checks that they
//! rigidly rotate.

pub mod dynamics;
pub mod error;
pub mod euler;
pub mod geometry;
pub mod inertia;
pub mod lagrange;
pub mod linalg;
pub mod masses;
pub mod potential;
pub mod roots;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{BodyPosition, Config, MeridianShape3, Shape3};
pub use masses::Masses;
pub use potential::PotentialKind;
