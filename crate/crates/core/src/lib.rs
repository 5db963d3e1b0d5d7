//! Structure and heavy-tail statistics for very large directed graphs.
//!
//! The crate is `no_std` (it needs `alloc`) so the algorithms can be embedded
//! anywhere; file formats, the command line and reporting live in the
//! `tailgraph` companion crate.
//!
//! Modules:
//!
//! - [`graph`]: compact immutable adjacency storage, degree histograms, transposition.
//! - [`aggregation`]: host extraction, public-suffix lookup and quotient graphs.
//! - [`components`]: strongly and weakly connected components.
//! - [`distances`]: approximate neighbourhood function, effective diameter, BFS diameter bound.
//! - [`tailfit`]: maximum-likelihood tail fitting, KS goodness of fit, bootstrap p-values.
//! - [`compare`]: normalized log-likelihood ratio tests and plausibility verdicts.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod aggregation;
pub mod compare;
pub mod components;
pub mod distances;
pub mod error;
pub mod graph;
pub mod optimize;
pub mod rng;
pub mod special;
pub mod tailfit;

pub use error::{Error, Result};
pub use graph::{AdjacencyGraph, DegreeHistogram, Direction, GraphBuilder, NodeId, SelfLoopPolicy};
