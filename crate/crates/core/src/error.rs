use std::path::PathBuf;

use thiserror::Error;

use crate::graph::Vertex;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },

    #[error("vertex set is empty")]
    EmptyVertexSet,

    #[error("vertex {0} has degree zero")]
    ZeroDegree(Vertex),

    #[error("edge ({0}, {1}) is not available in the graph")]
    MissingEdge(Vertex, Vertex),

    #[error("vertex {0} is not a seed")]
    NotASeed(Vertex),

    #[error("invalid referral: {0}")]
    InvalidReferral(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degree sequence is empty")]
    EmptyDegreeSequence,

    #[error("sample size {r} exceeds population size {n}")]
    SampleTooLarge { r: usize, n: usize },

    #[error("hash space of size {omega} cannot code {n} vertices injectively")]
    HashSpaceTooSmall { omega: u64, n: usize },

    #[error("invalid digit string {0:?}")]
    InvalidDigits(String),

    #[error("no hash code assigned to vertex {0}")]
    MissingCode(Vertex),

    #[error("estimator precondition violated: {0}")]
    Precondition(&'static str),

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("graph is empty after ingestion")]
    EmptyGraph,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
