//! The replication attribute: clone-placement policies combining a rate with
//! a host scope.

use std::collections::BTreeMap;
use std::fmt;

use crate::choice::{HopArity, PolicyKind};
use crate::error::ConfigError;
use crate::world::{Network, SiteId, SiteState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReplicationRate {
    ExactlyOnePerSite,
    AtMostOnePerSite,
    AtLeastOnePerSite,
}

impl ReplicationRate {
    pub fn name(self) -> &'static str {
        match self {
            ReplicationRate::ExactlyOnePerSite => "exactly_one",
            ReplicationRate::AtMostOnePerSite => "at_most_one",
            ReplicationRate::AtLeastOnePerSite => "at_least_one",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exactly_one" => Some(ReplicationRate::ExactlyOnePerSite),
            "at_most_one" => Some(ReplicationRate::AtMostOnePerSite),
            "at_least_one" => Some(ReplicationRate::AtLeastOnePerSite),
            _ => None,
        }
    }
}

/// Threshold predicate selecting replication hosts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScopePredicate {
    FreeDiskAtLeast(u64),
    LoadAtMost(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReplicationScope {
    AllAccessible,
    Criterion(ScopePredicate),
}

impl ReplicationScope {
    /// Up, allowed, and passing the predicate if any.
    pub fn admits(&self, site: &SiteState) -> bool {
        site.is_reachable()
            && match self {
                ReplicationScope::AllAccessible => true,
                ReplicationScope::Criterion(ScopePredicate::FreeDiskAtLeast(min)) => site.free_disk_mb >= *min,
                ReplicationScope::Criterion(ScopePredicate::LoadAtMost(max)) => site.load <= *max,
            }
    }

    /// Accepts `all`, `free_disk>=N` and `load<=X`.
    pub fn parse(s: &str) -> Option<Self> {
        if s == "all" {
            return Some(ReplicationScope::AllAccessible);
        }
        if let Some(n) = s.strip_prefix("free_disk>=") {
            return n.trim().parse().ok().map(|n| ReplicationScope::Criterion(ScopePredicate::FreeDiskAtLeast(n)));
        }
        if let Some(x) = s.strip_prefix("load<=") {
            return x
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(|x| ReplicationScope::Criterion(ScopePredicate::LoadAtMost(x)));
        }
        None
    }
}

impl fmt::Display for ReplicationScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReplicationScope::AllAccessible => f.write_str("all"),
            ReplicationScope::Criterion(ScopePredicate::FreeDiskAtLeast(n)) => write!(f, "free_disk>={n}"),
            ReplicationScope::Criterion(ScopePredicate::LoadAtMost(x)) => write!(f, "load<={x}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationPolicy {
    pub rate: ReplicationRate,
    pub scope: ReplicationScope,
}

impl PolicyKind for ReplicationPolicy {
    fn arity(&self) -> HopArity {
        HopArity::SingleShot
    }

    fn tag(&self) -> &'static str {
        self.rate.name()
    }
}

/// Clone counts per declared site; absent sites count zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CloneMap {
    counts: BTreeMap<SiteId, u64>,
}

impl CloneMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every declared key must exist in `network`.
    pub fn from_counts(counts: BTreeMap<SiteId, u64>, network: &Network) -> Result<Self, ConfigError> {
        if let Some(unknown) = counts.keys().find(|s| !network.contains(s)) {
            return Err(ConfigError::UndeclaredSite(unknown.clone()));
        }
        Ok(Self { counts })
    }

    /// Clone counts currently present on the network's sites.
    pub fn from_network(network: &Network) -> Self {
        Self {
            counts: network.sites().map(|s| (s.name.clone(), s.clone_count)).collect(),
        }
    }

    pub fn get(&self, site: &SiteId) -> u64 {
        self.counts.get(site).copied().unwrap_or(0)
    }

    pub fn add(&mut self, site: &SiteId, n: u64) {
        *self.counts.entry(site.clone()).or_insert(0) += n;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SiteId, u64)> {
        self.counts.iter().map(|(s, c)| (s, *c))
    }
}

/// Creations needed for `policy`, in site-name order. Never plans deletions;
/// `at_most_one` is a cap and plans nothing.
pub fn plan_replication(policy: &ReplicationPolicy, network: &Network, clones: &CloneMap) -> Vec<(SiteId, u64)> {
    match policy.rate {
        ReplicationRate::AtMostOnePerSite => Vec::new(),
        ReplicationRate::ExactlyOnePerSite | ReplicationRate::AtLeastOnePerSite => network
            .sites()
            .filter(|s| policy.scope.admits(s) && clones.get(&s.name) == 0)
            .map(|s| (s.name.clone(), 1))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Placement {
    Ok,
    Violations(Vec<SiteId>),
}

pub fn validate_placement(policy: &ReplicationPolicy, clones: &CloneMap, network: &Network) -> Placement {
    let violations: Vec<SiteId> = network
        .sites()
        .filter(|s| {
            let count = clones.get(&s.name);
            let in_scope = policy.scope.admits(s);
            match policy.rate {
                ReplicationRate::ExactlyOnePerSite => in_scope && count != 1,
                ReplicationRate::AtMostOnePerSite => count > 1,
                ReplicationRate::AtLeastOnePerSite => in_scope && count == 0,
            }
        })
        .map(|s| s.name.clone())
        .collect();
    if violations.is_empty() {
        Placement::Ok
    } else {
        Placement::Violations(violations)
    }
}

/// Places the planned clones on the network and credits them to `own`.
pub fn apply_plan(network: &mut Network, plan: &[(SiteId, u64)], own: &mut CloneMap) {
    for (site, n) in plan {
        if let Some(state) = network.site_mut(site) {
            state.clone_count += n;
            own.add(site, *n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::SiteStatus;

    fn net(sites: Vec<SiteState>) -> Network {
        let launch = sites[0].name.clone();
        Network::new(sites, launch, vec![]).unwrap()
    }

    fn abc() -> Network {
        net(vec![SiteState::new("A"), SiteState::new("B"), SiteState::new("C")])
    }

    fn counts(pairs: &[(&str, u64)], n: &Network) -> CloneMap {
        CloneMap::from_counts(pairs.iter().map(|(s, c)| (SiteId::from(*s), *c)).collect(), n).unwrap()
    }

    fn policy(rate: ReplicationRate, scope: ReplicationScope) -> ReplicationPolicy {
        ReplicationPolicy { rate, scope }
    }

    #[test]
    fn at_least_one_fills_empty_sites() {
        let n = abc();
        let p = policy(ReplicationRate::AtLeastOnePerSite, ReplicationScope::AllAccessible);
        let plan = plan_replication(&p, &n, &counts(&[("A", 1), ("B", 0), ("C", 0)], &n));
        assert_eq!(plan, vec![("B".into(), 1), ("C".into(), 1)]);
    }

    #[test]
    fn at_most_one_plans_nothing() {
        let n = abc();
        let p = policy(ReplicationRate::AtMostOnePerSite, ReplicationScope::AllAccessible);
        assert!(plan_replication(&p, &n, &CloneMap::new()).is_empty());
        assert!(plan_replication(&p, &n, &counts(&[("A", 3)], &n)).is_empty());
    }

    #[test]
    fn scope_predicate_filters_hosts() {
        let n = net(vec![
            SiteState { free_disk_mb: 800, ..SiteState::new("B") },
            SiteState { free_disk_mb: 100, ..SiteState::new("C") },
        ]);
        let p = policy(
            ReplicationRate::ExactlyOnePerSite,
            ReplicationScope::Criterion(ScopePredicate::FreeDiskAtLeast(500)),
        );
        assert_eq!(plan_replication(&p, &n, &CloneMap::new()), vec![("B".into(), 1)]);
    }

    #[test]
    fn down_sites_are_out_of_scope() {
        let n = net(vec![
            SiteState::new("A"),
            SiteState { status: SiteStatus::Down, ..SiteState::new("B") },
        ]);
        let p = policy(ReplicationRate::AtLeastOnePerSite, ReplicationScope::AllAccessible);
        assert_eq!(plan_replication(&p, &n, &CloneMap::new()), vec![("A".into(), 1)]);
    }

    #[test]
    fn placement_validation() {
        let n = net(vec![SiteState::new("A")]);
        let at_most = policy(ReplicationRate::AtMostOnePerSite, ReplicationScope::AllAccessible);
        assert_eq!(validate_placement(&at_most, &counts(&[("A", 2)], &n), &n), Placement::Violations(vec!["A".into()]));
        let at_least = policy(ReplicationRate::AtLeastOnePerSite, ReplicationScope::AllAccessible);
        assert_eq!(validate_placement(&at_least, &counts(&[("A", 0)], &n), &n), Placement::Violations(vec!["A".into()]));

        let n = net(vec![SiteState::new("A"), SiteState::new("B")]);
        let exactly = policy(ReplicationRate::ExactlyOnePerSite, ReplicationScope::AllAccessible);
        assert_eq!(validate_placement(&exactly, &counts(&[("A", 1), ("B", 1)], &n), &n), Placement::Ok);
    }

    #[test]
    fn applying_a_plan_satisfies_the_policy() {
        for rate in [ReplicationRate::ExactlyOnePerSite, ReplicationRate::AtLeastOnePerSite] {
            let mut n = abc();
            let p = policy(rate, ReplicationScope::AllAccessible);
            let mut own = CloneMap::new();
            let plan = plan_replication(&p, &n, &CloneMap::from_network(&n));
            apply_plan(&mut n, &plan, &mut own);
            assert_eq!(validate_placement(&p, &CloneMap::from_network(&n), &n), Placement::Ok);
            assert_eq!(own.get(&"B".into()), 1);
        }
    }

    #[test]
    fn undeclared_clone_key_rejected() {
        let n = abc();
        let bad = CloneMap::from_counts([(SiteId::from("Z"), 1)].into_iter().collect(), &n);
        assert!(bad.is_err());
    }

    #[test]
    fn scope_parsing() {
        assert_eq!(ReplicationScope::parse("all"), Some(ReplicationScope::AllAccessible));
        assert_eq!(
            ReplicationScope::parse("free_disk>=500"),
            Some(ReplicationScope::Criterion(ScopePredicate::FreeDiskAtLeast(500)))
        );
        assert_eq!(ReplicationScope::parse("free_disk>=lots"), None);
        let s = ReplicationScope::parse("load<=0.25").unwrap();
        assert_eq!(ReplicationScope::parse(&s.to_string()), Some(s));
    }
}
