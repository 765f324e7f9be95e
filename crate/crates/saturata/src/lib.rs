//! Workbench for saturated set families over small ground sets.
//!
//! A family `F ⊆ 2^[n]` is *s-saturated* when it contains no `s` pairwise
//! disjoint members and no set can be added without creating them. This
//! crate keeps exact, desk-scale (`n ≤ 22`) implementations of everything
//! such families are made of: the disjoint-occurrence product and its
//! powers, coordinate sections, Boolean-function influences with the
//! Kahn–Kalai–Linial inequality, the known size lower bounds in exact
//! rational arithmetic, explicit constructions, exhaustive minimum search
//! at tiny `n`, and exact-rank verification of the product-polynomial
//! counting argument.
//!
//! Fast kernels are paired with independent oracles throughout: the subset
//! convolution against submask enumeration, the matching number against a
//! direct dynamic program, closed-form counts against enumeration.

pub mod boxalg;
pub mod bounds;
pub mod constructions;
mod error;
pub mod family;
pub mod influence;
pub mod io;
mod mask;
pub mod ranklab;

pub use error::{Error, Result};
pub use family::{MaskOrder, SaturationVerdict, SetFamily, DEFAULT_GROUND_SET_CAP};
pub use mask::Mask;
