//! Geometry engine for orthosecting tetrahedra: pairs of tetrahedra whose
//! non-corresponding edges intersect at right angles.
//!
//! The crate is organized bottom-up:
//!
//! - [`geom`]: points, lines, planes, circles, spheres and tolerances.
//! - [`orthology`]: tetrahedra, orthogonality residuals, orthology centers,
//!   construction of orthologic partners and labeling search.
//! - [`pedal`]: pedal triangles, isogonal conjugation, pedal chains and the
//!   reconstruction of a partner from a spherical chain.
//! - [`solver`]: the twelve-equation orthosecting system, a damped
//!   least-squares solver and continuation along the solution family.
//! - [`analysis`]: sphere verification, conjugation, tracing the
//!   self-conjugate curve and conjugate sequences.
//! - [`scene`], [`report`], [`export`], [`cli`]: file formats and the
//!   command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod export;
pub mod geom;
pub mod orthology;
pub mod pedal;
pub mod poly;
pub mod report;
pub mod scene;
pub mod solver;

pub use error::{Error, Result};
pub use geom::{Point, Tolerance, Vector};
pub use orthology::Tetrahedron;
