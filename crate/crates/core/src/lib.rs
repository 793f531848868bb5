//! Generalized shortest-path distance closures and distance backbones of
//! weighted graphs.
//!
//! A weighted graph whose edges carry distances admits a family of
//! shortest-path calculations: the path length can be the sum of edge
//! distances, their maximum, a Minkowski mean, or any other commutative
//! associative monotone operation with identity 0 ([`algebra`]). Closing
//! the graph under one of these operations ([`closure`]) shrinks every
//! pair's distance to its best indirect alternative. The edges whose
//! direct distance survives the closure form the *distance backbone*
//! ([`backbone`]): a connected, bridge-containing subgraph sufficient to
//! recompute every shortest path, while all other edges are redundant for
//! routing and characterized by their distortion ratio.
//!
//! The crate ships the closure engines (label-setting and algebraic),
//! backbone extraction and measures, baseline reductions for contrast
//! ([`reductions`]), dataset ingestion and report writers ([`io`]), an
//! executable property suite ([`verification`]), and a command-line
//! front end (`backbone`).

pub mod algebra;
pub mod backbone;
pub mod cli;
pub mod closure;
pub mod corpus;
pub mod graph;
pub mod io;
pub mod reductions;
pub mod rng;
pub mod verification;

pub use algebra::{LengthOperator, Operator};
pub use backbone::{extract_backbone, Backbone};
pub use closure::{sp_closure_algebraic, sp_closure_dijkstra, ClosureResult};
pub use graph::{build_distance_graph, DistanceGraph, EdgeKey, NodeId};
