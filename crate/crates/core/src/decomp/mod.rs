//! Tree, path and NLC decompositions.

mod arrangement;
mod nice;
mod nlc;
mod tree;

use thiserror::Error;

pub use arrangement::{arrangement_to_nice_path, LinearArrangement};
pub use nice::{make_nice, make_nice_path, NiceDecomposition, NiceKind, NiceNode};
pub use nlc::{LabeledGraph, NlcExpression, NlcNode};
pub use tree::TreeDecomposition;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum DecompError {
    #[error("decomposition has no bags")]
    Empty,
    #[error("tree edge ({a}, {b}) is invalid")]
    BadTreeEdge { a: usize, b: usize },
    #[error("bags do not form a tree")]
    NotATree,
    #[error("decomposition is not a path")]
    NotAPath,
    #[error("vertex {} is out of range", .0 + 1)]
    VertexOutOfRange(usize),
    #[error("vertex {} is in no bag", .0 + 1)]
    VertexNotCovered(usize),
    #[error("bags containing vertex {} are not connected", .0 + 1)]
    OccurrenceDisconnected(usize),
    #[error("edge {} is in no bag", .0 + 1)]
    EdgeNotCovered(usize),
    #[error("arrangement is not a permutation of the vertices")]
    NotAPermutation,
    #[error("nice decomposition node {node}: {reason}")]
    NotNice { node: usize, reason: String },
    #[error("expression node {node}: {reason}")]
    BadExpression { node: usize, reason: String },
    #[error("expression graph differs from the instance graph")]
    GraphMismatch,
}
