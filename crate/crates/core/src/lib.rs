//! Hidden-population size estimation from respondent-driven samples.

pub mod anonymity;
pub mod clustering;
pub mod error;
pub mod estimators;
pub mod generate;
pub mod graph;
pub mod harness;
pub mod ingest;
pub mod multiset;
pub mod sampling;
pub mod scalar;
pub mod survey;

pub use anonymity::{assign_hashes, hashed_view, Code, HashMode, HashSpace, HashedSample};
pub use clustering::{clustering_stats, ClusteringStats};
pub use error::{Error, Result};
pub use estimators::{EstimateResult, EstimatorKind, FailureCause};
pub use generate::{DegreeDistribution, GraphFamily};
pub use graph::{MultiGraph, ReferralForest, Vertex};
pub use harness::{run_plan, summarize, ExperimentPlan, RawRow, Summary, SummaryRow};
pub use ingest::{load_edge_list, EdgeListSpec, IngestReport, Ingested};
pub use multiset::Multiset;
pub use sampling::{rds_capture, uniform_sample, RdsConfig, RdsSample, RecruitLaw};
pub use scalar::{RealScalar, Scalar};
pub use survey::{Respondent, Survey};

/// Exact rational scalar for the plaintext estimators.
pub type Exact = num_rational::BigRational;

pub type Estimate = EstimateResult<f64>;
pub type Estimate32 = EstimateResult<f32>;
pub type ExactEstimate = EstimateResult<Exact>;
