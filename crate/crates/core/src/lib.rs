//! Orbit-index colored bifurcation diagrams and the combinatorics around them.
//!
//! A bifurcation diagram is a multigraph whose edges are periodic-orbit
//! branches, colored by orbit index in {-1, 0, +1}, and whose vertices are
//! bifurcation events. This crate validates diagrams against
//! dimension-dependent laws, enumerates colored trees, and provides the graph
//! and matroid tools used to study them: star and clique representations,
//! line graphs, block and cactus detection, spanning-tree counts and minor
//! tests.

mod bigserde;
pub mod canon;
pub mod catalog;
pub mod classes;
pub mod combinatorics;
pub mod diagram;
pub mod enumeration;
pub mod graph;
pub mod io;
pub mod laws;
pub mod matroid;
pub mod representations;
pub mod spanning;
pub mod tree;

pub use diagram::{BifurcationKind, Diagram, DiagramError, OrbitIndex};
pub use graph::SimpleGraph;
pub use laws::{builtin_table, LawTable};
