//! Criterion-weighted indoor route planning.
//!
//! The crate plans routes through a multi-floor path network under an
//! additive cost model of eleven wayfinding criteria, scores computed routes
//! against a corpus of preferred routes, and calibrates each criterion's
//! weight by grid search.

pub mod calibrate;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod graph;
pub mod plot;
pub mod router;
pub mod similarity;
pub mod synth;

pub use criteria::{CostModel, CriterionKind, StepContext, WeightedCriterion};
pub use error::{Error, Result};
pub use graph::{EdgeKind, IndoorGraph, NodeId, NodeIx, NodeKind};
pub use router::{brute_force_route, plan_route, Route, SearchMode};
