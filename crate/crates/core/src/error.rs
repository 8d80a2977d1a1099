use thiserror::Error;

use crate::world::SiteId;

/// A scenario or policy configuration that cannot be honored.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("policy set for {0} is empty")]
    EmptyPolicySet(String),
    #[error("policy set for {attribute} has {count} policies; an autonomous attribute needs more than one")]
    TooFewPolicies { attribute: String, count: usize },
    #[error("invalid choice weights: {0}")]
    InvalidWeights(String),
    #[error("override target P{target} is outside 1..={count}")]
    OverrideOutOfRange { target: usize, count: usize },
    #[error("undeclared site `{0}`")]
    UndeclaredSite(SiteId),
    #[error("route is empty")]
    EmptyRoute,
    #[error("route repeats `{0}` on consecutive hops")]
    RepeatedHop(SiteId),
    #[error("route ends at the starting site `{0}`; that is circular navigation")]
    RouteEndsAtStart(SiteId),
    #[error("duplicate site `{0}`")]
    DuplicateSite(SiteId),
    #[error("launch site `{0}` must be up and allowed at step 0")]
    LaunchUnavailable(SiteId),
    #[error("load {0} is outside [0, 1]")]
    LoadOutOfRange(f64),
    #[error("migration target equals current site `{0}`")]
    SelfMigration(SiteId),
}

/// A navigation policy could not produce a hop.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("no candidate site other than `{0}`")]
    NoCandidate(SiteId),
    #[error("circular navigation needs at least two sites")]
    TooFewSites,
}

/// Broken internal precondition; indicates a bug in the caller.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("internal error: {0}")]
pub struct InternalError(pub String);
