//! The mobility attribute: four navigation policies and multi-hop route
//! mechanics.

use std::cmp::Reverse;
use std::collections::VecDeque;
use std::fmt;

use crate::choice::{HopArity, PolicyKind};
use crate::error::{ConfigError, PlanError};
use crate::rng::RngStream;
use crate::world::{Network, SiteId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NavigationMode {
    Random,
    Circular,
    Route,
    Directed,
}

impl NavigationMode {
    pub fn name(self) -> &'static str {
        match self {
            NavigationMode::Random => "random",
            NavigationMode::Circular => "circular",
            NavigationMode::Route => "route",
            NavigationMode::Directed => "directed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "random" => NavigationMode::Random,
            "circular" => NavigationMode::Circular,
            "route" => NavigationMode::Route,
            "directed" => NavigationMode::Directed,
            _ => return None,
        })
    }

    pub fn arity(self) -> HopArity {
        match self {
            NavigationMode::Random | NavigationMode::Directed => HopArity::MonoHop,
            NavigationMode::Circular | NavigationMode::Route => HopArity::MultiHop,
        }
    }
}

/// Directed navigation target: least loaded host or most free disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectedCriterion {
    LeastLoaded,
    MostFreeDisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Load,
    FreeDisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Minimize,
    Maximize,
}

impl DirectedCriterion {
    pub fn metric(self) -> Metric {
        match self {
            DirectedCriterion::LeastLoaded => Metric::Load,
            DirectedCriterion::MostFreeDisk => Metric::FreeDisk,
        }
    }

    pub fn objective(self) -> Objective {
        match self {
            DirectedCriterion::LeastLoaded => Objective::Minimize,
            DirectedCriterion::MostFreeDisk => Objective::Maximize,
        }
    }

    /// Only `(load, minimize)` and `(free_disk, maximize)` are supported.
    pub fn from_parts(metric: Metric, objective: Objective) -> Option<Self> {
        match (metric, objective) {
            (Metric::Load, Objective::Minimize) => Some(DirectedCriterion::LeastLoaded),
            (Metric::FreeDisk, Objective::Maximize) => Some(DirectedCriterion::MostFreeDisk),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DirectedCriterion::LeastLoaded => "least_loaded",
            DirectedCriterion::MostFreeDisk => "most_free_disk",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "least_loaded" => Some(DirectedCriterion::LeastLoaded),
            "most_free_disk" => Some(DirectedCriterion::MostFreeDisk),
            _ => None,
        }
    }
}

/// A planned sequence of hops: non-empty, no site repeated back to back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    hops: Vec<SiteId>,
}

impl Route {
    pub fn new(hops: Vec<SiteId>) -> Result<Self, ConfigError> {
        if hops.is_empty() {
            return Err(ConfigError::EmptyRoute);
        }
        if let Some(w) = hops.windows(2).find(|w| w[0] == w[1]) {
            return Err(ConfigError::RepeatedHop(w[0].clone()));
        }
        Ok(Self { hops })
    }

    pub fn hops(&self) -> &[SiteId] {
        &self.hops
    }
}

/// One member of the mobility policy set.
#[derive(Debug, Clone, PartialEq)]
pub enum NavigationPolicy {
    Random,
    Circular,
    Route(Route),
    Directed(DirectedCriterion),
}

impl NavigationPolicy {
    pub fn mode(&self) -> NavigationMode {
        match self {
            NavigationPolicy::Random => NavigationMode::Random,
            NavigationPolicy::Circular => NavigationMode::Circular,
            NavigationPolicy::Route(_) => NavigationMode::Route,
            NavigationPolicy::Directed(_) => NavigationMode::Directed,
        }
    }
}

impl PolicyKind for NavigationPolicy {
    fn arity(&self) -> HopArity {
        self.mode().arity()
    }

    fn tag(&self) -> &'static str {
        self.mode().name()
    }
}

impl fmt::Display for NavigationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mode().name())
    }
}

/// Uniform over every declared site except `current`, whatever its state.
pub fn plan_random_transfer(network: &Network, current: &SiteId, rng: &mut RngStream) -> Result<SiteId, PlanError> {
    let candidates: Vec<&SiteId> = network.site_ids().filter(|s| *s != current).collect();
    if candidates.is_empty() {
        return Err(PlanError::NoCandidate(current.clone()));
    }
    Ok(candidates[rng.next_index(candidates.len())].clone())
}

/// Every other site once in name order, then back to `start`.
pub fn plan_circular(network: &Network, start: &SiteId) -> Result<Route, PlanError> {
    debug_assert!(network.contains(start));
    if network.len() < 2 {
        return Err(PlanError::TooFewSites);
    }
    let mut hops: Vec<SiteId> = network.site_ids().filter(|s| *s != start).cloned().collect();
    hops.push(start.clone());
    Ok(Route::new(hops).expect("distinct sites form a valid route"))
}

/// Validates a configured route. Its arrival must differ from `launch`.
pub fn plan_route(spec: &[SiteId], launch: &SiteId, network: &Network) -> Result<Route, ConfigError> {
    if let Some(unknown) = spec.iter().find(|s| !network.contains(s)) {
        return Err(ConfigError::UndeclaredSite(unknown.clone()));
    }
    let route = Route::new(spec.to_vec())?;
    if route.hops.last() == Some(launch) {
        return Err(ConfigError::RouteEndsAtStart(launch.clone()));
    }
    Ok(route)
}

/// Best reachable site other than `current`; ties go to the smallest name.
pub fn plan_directed(network: &Network, current: &SiteId, criterion: DirectedCriterion) -> Result<SiteId, PlanError> {
    let candidates = network
        .sites()
        .filter(|s| &s.name != current && s.is_reachable());
    let best = match criterion {
        DirectedCriterion::LeastLoaded => candidates.min_by(|a, b| a.load.total_cmp(&b.load).then_with(|| a.name.cmp(&b.name))),
        DirectedCriterion::MostFreeDisk => candidates.min_by_key(|s| (Reverse(s.free_disk_mb), s.name.clone())),
    };
    best.map(|s| s.name.clone())
        .ok_or_else(|| PlanError::NoCandidate(current.clone()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Hop(SiteId),
    Finished,
    /// Planning failed; the policy is over without a hop.
    Failed(PlanError),
}

/// Progress of one activation of a navigation policy.
#[derive(Debug, Clone, PartialEq)]
pub struct NavigationState {
    policy: NavigationPolicy,
    remaining: VecDeque<SiteId>,
    visited: Vec<SiteId>,
    launch: SiteId,
    hopped: bool,
}

impl NavigationState {
    /// Starts `policy` from `start`. Circular routes return to `start`.
    pub fn start(policy: &NavigationPolicy, network: &Network, start: &SiteId) -> Result<Self, PlanError> {
        let remaining = match policy {
            NavigationPolicy::Circular => plan_circular(network, start)?.hops.into(),
            NavigationPolicy::Route(route) => route.hops.iter().cloned().collect(),
            NavigationPolicy::Random | NavigationPolicy::Directed(_) => VecDeque::new(),
        };
        Ok(Self {
            policy: policy.clone(),
            remaining,
            visited: Vec::new(),
            launch: start.clone(),
            hopped: false,
        })
    }

    pub fn mode(&self) -> NavigationMode {
        self.policy.mode()
    }

    pub fn remaining(&self) -> impl Iterator<Item = &SiteId> {
        self.remaining.iter()
    }

    /// Hop targets issued so far, in order.
    pub fn visited(&self) -> &[SiteId] {
        &self.visited
    }

    pub fn launch(&self) -> &SiteId {
        &self.launch
    }

    /// No further hop will be produced.
    pub fn is_exhausted(&self) -> bool {
        match self.mode().arity() {
            HopArity::MultiHop => self.remaining.is_empty(),
            _ => self.hopped,
        }
    }

    /// Next hop of the policy. Mono-hop modes hop once then finish;
    /// multi-hop modes pop their remaining list, skipping entries equal to
    /// the agent's location.
    pub fn step_policy(&mut self, network: &Network, current: &SiteId, rng: &mut RngStream) -> StepOutcome {
        let planned = match &self.policy {
            NavigationPolicy::Random | NavigationPolicy::Directed(_) if self.hopped => return StepOutcome::Finished,
            NavigationPolicy::Random => {
                self.hopped = true;
                plan_random_transfer(network, current, rng)
            }
            NavigationPolicy::Directed(criterion) => {
                self.hopped = true;
                plan_directed(network, current, *criterion)
            }
            NavigationPolicy::Circular | NavigationPolicy::Route(_) => {
                while self.remaining.front() == Some(current) {
                    self.remaining.pop_front();
                }
                match self.remaining.pop_front() {
                    Some(next) => Ok(next),
                    None => return StepOutcome::Finished,
                }
            }
        };
        match planned {
            Ok(site) => {
                self.visited.push(site.clone());
                StepOutcome::Hop(site)
            }
            Err(e) => StepOutcome::Failed(e),
        }
    }
}
