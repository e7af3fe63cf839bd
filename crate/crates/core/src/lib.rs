//! Software project risk assessment built on a factor-influence graph.
//!
//! A risk's type, probability and frequency are independent factors. They
//! drive its impact, and impact drives its priority. This crate models that
//! graph and its boolean adjacency matrix, computes the transitive closure
//! with Warshall's algorithm, scores and ranks a risk register, and estimates
//! the project success rate.
//!
//! ```
//! use riskgraph::closure::transitive_closure;
//! use riskgraph::graph::canonical_factor_graph;
//!
//! let graph = canonical_factor_graph();
//! let closure = transitive_closure(&graph.adjacency_matrix());
//! assert_eq!(closure.get_by_id("N1", "N5"), Some(true));
//! ```

pub mod assessment;
pub mod cli;
pub mod closure;
pub mod export;
pub mod graph;
pub mod predictor;
pub mod register;

pub use assessment::{impact, prioritize, residual_impact, Assessment, ImpactScore};
pub use closure::{is_transitive, reachable, transitive_closure};
pub use graph::{canonical_factor_graph, BoolMatrix, Factor, FactorGraph, FactorKind};
pub use predictor::{monte_carlo_success, project_success_rate, SuccessEstimate};
pub use register::{
    classify_type, parse_register, validate_risk, FrequencyClass, Mitigation, Probability, Risk, RiskKind,
    RiskRegister,
};
