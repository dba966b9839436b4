//! Distances and related invariants on the Bruhat–Tits building of
//! `SL_d(Q_p)`, computed from valuations of determinants of matrix
//! representatives.
//!
//! A vertex is the homothety class of the `Z_p`-lattice spanned by the rows
//! of an invertible rational matrix. Graph distance, type labels, several
//! restricted distances and a lower bound on total distance to a finite set
//! of vertices are all evaluated from the mixed-minor table
//! [`invariants::m_table`]. The [`building`] module provides an explicit
//! neighbor enumeration and breadth-first search used to check those
//! formulas.

#![allow(clippy::needless_range_loop)]

pub mod apartments2;
pub mod assignment;
pub mod building;
pub mod error;
pub mod invariants;
pub mod linalg;
pub mod multivertex;
pub mod padic;
pub mod sample;

#[cfg(test)]
mod testutil;

pub use apartments2::{intersection_range, shared_edges, Apartment2, IntersectionKind, IntersectionRange, SharedEdges};
pub use building::{bfs_distance, neighbors, BfsMode, BuildingGraph, ExponentBox};
pub use error::{Error, Result};
pub use invariants::{distance, m_table, FormulaCoefficients, MTable};
pub use linalg::{canonical_vertex_key, localized_form, LocalizedForm, MatrixFile, MatrixRep, VertexKey};
pub use multivertex::{steiner_lower_bound, total_distance, SteinerBound, TreeBound, VertexTuple};
pub use padic::{PrimeContext, Rational, Valuation};
