//! Population protocols under crash faults.
//!
//! [`model`] holds configurations, protocols and their one-step semantics;
//! [`builders`] constructs the catalogue protocols together with the
//! predicates they decide; [`verifier`] computes outputs, tolerances and
//! robustness exactly on bounded populations; [`simulator`] samples random
//! executions for protocols too large to explore.

pub mod builders;
pub mod exec;
pub mod model;
pub mod simulator;
pub mod verifier;

pub use exec::Exec;
pub use model::{Configuration, ModelError, Opinion, Output, OutputKind, Protocol, StateId, Transition};
