use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::tailfit::ModelKind;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied argument violates an operation's precondition.
    InvalidArgument(String),
    /// An arc endpoint is not below the declared node count.
    NodeOutOfRange { node: u64, node_count: u64 },
    /// Strict ingestion saw the same arc twice.
    DuplicateArc { src: u32, dst: u32 },
    /// A group map does not cover every node of the graph.
    UnmappedNode { node: u32 },
    /// The URL has no usable host component.
    HostExtraction { url: String, reason: &'static str },
    /// The host is itself a public suffix, so there is no label to keep above it.
    NoPld { host: String },
    /// Fitting needs at least two distinct observed values.
    DegenerateInput,
    /// No xmin candidate leaves a tail of two or more observations.
    InsufficientTail,
    /// No observations at or above xmin.
    EmptyTail { xmin: u64 },
    /// The model cannot be normalized over `[xmin, inf)` with these parameters.
    NonNormalizable { kind: ModelKind },
    /// Numerical likelihood maximization did not converge.
    NonConvergence { kind: ModelKind, last: Vec<f64>, gradient_norm: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::NodeOutOfRange { node, node_count } => {
                write!(f, "node {node} out of range for graph with {node_count} nodes")
            }
            Error::DuplicateArc { src, dst } => write!(f, "duplicate arc {src} -> {dst}"),
            Error::UnmappedNode { node } => write!(f, "node {node} has no group"),
            Error::HostExtraction { url, reason } => {
                write!(f, "cannot extract host from {url:?}: {reason}")
            }
            Error::NoPld { host } => write!(f, "{host:?} is a public suffix and has no pay-level domain"),
            Error::DegenerateInput => f.write_str("need at least two distinct observed values"),
            Error::InsufficientTail => f.write_str("no xmin candidate leaves a tail of at least two observations"),
            Error::EmptyTail { xmin } => write!(f, "no observations at or above xmin={xmin}"),
            Error::NonNormalizable { kind } => write!(f, "{kind} model is not normalizable with these parameters"),
            Error::NonConvergence { kind, last, gradient_norm } => write!(
                f,
                "{kind} likelihood maximization did not converge (last iterate {last:?}, gradient norm {gradient_norm:.3e})"
            ),
        }
    }
}

impl core::error::Error for Error {}
