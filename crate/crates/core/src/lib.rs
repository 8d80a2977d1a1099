//! Agents autonomous with regard to an attribute.
//!
//! An attribute (mobility, replication, ...) owns a static set of use
//! policies. It is autonomous when a two-stage choice module picks among
//! them: a deterministic component that selects or maintains a policy, then
//! a nondeterministic component that may keep it, override it, or inhibit it
//! with the empty policy. The crate provides that module, the mobility and
//! replication attributes, a seeded simulator of a host network, and the
//! classification criteria used to compare autonomy models.

pub mod choice;
pub mod cli;
pub mod error;
pub mod mobility;
pub mod replication;
pub mod report;
pub mod rng;
pub mod runtime;
pub mod scenario;
pub mod sweep;
pub mod taxonomy;
pub mod trace;
pub mod world;

pub use choice::{
    autonomous_choice, deterministic_choice, nondeterministic_choice, AttributeDescriptor, AttributeId, Branch,
    ChoiceState, ChoiceWeights, PolicyId, PolicySet,
};
pub use report::{render_report, HaltReason, Report};
pub use rng::RngStream;
pub use runtime::{run_agent, run_agent_with_seed, Run, RunError};
pub use scenario::{parse_scenario, render_scenario, Scenario, ScenarioError};
pub use trace::{emit_trace, Trace, TraceEvent, TraceKind};
pub use world::{Network, SiteId};
