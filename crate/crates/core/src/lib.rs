//! Fast revenue evaluation for the Stackelberg shortest-path-tree pricing
//! game.
//!
//! A leader prices `k` priceable edges of a directed graph; a follower
//! routes every vertex's demand from the root along a shortest-path tree,
//! breaking ties in the leader's favour. [`RevenueOracle`] preprocesses an
//! instance once and then answers "what revenue does this price vector
//! earn?" with a constant number of orthogonal range queries, instead of a
//! full shortest-path computation per price vector.

pub mod error;
pub mod generate;
pub mod instance;
pub mod lex_dijkstra;
pub mod model_graph;
pub mod oracle;
pub mod range_tree;
pub mod rational;
pub mod solver;

pub use error::{Error, Result};
pub use generate::{random_instance, GeneratorParams};
pub use instance::{parse_instance, serialize_instance, Edge, EdgeKind, Instance, PriceFunction};
pub use lex_dijkstra::{naive_revenue, CompositeWeight};
pub use model_graph::{EdgeSequence, ModelGraph, ReducedTree, TreeSlot};
pub use oracle::{build_oracle, RevenueBreakdown, RevenueOracle};
pub use range_tree::{Interval, QueryRect, RangeTree, WeightedPointSet};
pub use rational::{ExtRational, Rational};
pub use solver::{
    heuristic_candidates, solve, solve_parallel, verify_oracle, CandidateSet, PriceSampler, SolveResult, VerifyReport,
};
