//! Circle packings invariant under Kleinian groups.
//!
//! The crate is organised around four layers:
//!
//! - [`moebius`]: Möbius (and anti-Möbius) maps acting on the Riemann sphere and
//!   on upper half-space, generalized circles in Hermitian coordinates, hyperbolic
//!   distance and Busemann cocycles.
//! - [`packing`]: Apollonian gaskets from Descartes quadruples, Schottky pairings,
//!   and generic group-orbit enumeration with curvature pruning and deduplication.
//! - [`counting`]: the curvature counting function `N_T(P, E)` over planar regions,
//!   count series, power-law fits, ratio and dual-count diagnostics.
//! - [`measures`]: the limiting distribution of small circles, approximated both
//!   empirically and from truncated Poincaré series over an orbit in H³.
//!
//! [`io`] and [`render`] hold the CSV/JSON interchange formats and SVG output.

// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counting;
pub mod error;
pub mod io;
pub mod measures;
pub mod moebius;
pub mod packing;
pub mod render;
pub mod tol;

pub use error::{Error, Result};
