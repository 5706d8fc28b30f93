//! # svsparse
//!
//! Singular-value (SV) approximation and sparsification for Eulerian
//! digraphs, with a dense oracle that measures every approximation claim.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`dyadic`], [`graph`], [`io`] | exact weights, digraphs, lifts, text format |
//! | [`dense`] | standard / unit-circle / SV approximation measurement |
//! | [`sparsify`] | cycle decomposition, expander partition, SV sparsifier |
//! | [`powers`] | products, derandomized square, weight fixing, power sparsifier |
//! | [`walks`] | stationary vectors, Eulerian scaling, cut estimation |
//! | [`solver`] | squaring-recursion preconditioner for normal walk matrices |
//! | [`gen`] | deterministic test-graph generators |
//!
//! All randomness derives from a single 64-bit [`Seed`].

pub mod dense;
pub mod dyadic;
pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod powers;
pub mod rng;
pub mod solver;
pub mod sparsify;
pub mod walks;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use graph::{
    bipartite_lift, degrees, extract_directed, validate_eulerian, Edge, EulerianCheck,
    EulerianView, UEdge, UndirectedGraph, WeightedDigraph,
};
pub use io::{parse_graph, write_graph};
pub use rng::Seed;

/// Default dense-oracle vertex cap.
pub const DEFAULT_ORACLE_CAP: usize = 512;

/// Oracle cap, overridable through `SVSPARSE_ORACLE_CAP`.
pub fn oracle_cap() -> usize {
    std::env::var("SVSPARSE_ORACLE_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_ORACLE_CAP)
}
