//! Simulated hosts, migration outcomes, the agent's task and its two
//! perception attributes.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{ConfigError, InternalError};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SiteId(String);

impl SiteId {
    pub fn new(name: impl Into<String>) -> Self {
        SiteId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Site names are non-empty tokens without whitespace or commas.
    pub fn is_valid_name(name: &str) -> bool {
        !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || c == ',' || c == ']' || c == '[')
    }
}

impl fmt::Display for SiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SiteId {
    fn from(s: &str) -> Self {
        SiteId(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteStatus {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Access {
    Allowed,
    Prohibited,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiteState {
    pub name: SiteId,
    pub status: SiteStatus,
    pub access: Access,
    pub users: Vec<String>,
    pub load: f64,
    pub free_disk_mb: u64,
    pub clone_count: u64,
}

impl SiteState {
    /// An up, allowed, idle site with no users.
    pub fn new(name: impl Into<SiteId>) -> Self {
        Self {
            name: name.into(),
            status: SiteStatus::Up,
            access: Access::Allowed,
            users: Vec::new(),
            load: 0.0,
            free_disk_mb: 0,
            clone_count: 0,
        }
    }

    pub fn is_reachable(&self) -> bool {
        self.status == SiteStatus::Up && self.access == Access::Allowed
    }
}

impl From<String> for SiteId {
    fn from(s: String) -> Self {
        SiteId(s)
    }
}

/// A scripted change to one field of a site.
#[derive(Debug, Clone, PartialEq)]
pub enum SiteChange {
    Status(SiteStatus),
    Access(Access),
    Users(Vec<String>),
    Load(f64),
    FreeDiskMb(u64),
    CloneCount(u64),
}

impl SiteChange {
    pub fn field(&self) -> &'static str {
        match self {
            SiteChange::Status(_) => "status",
            SiteChange::Access(_) => "access",
            SiteChange::Users(_) => "users",
            SiteChange::Load(_) => "load",
            SiteChange::FreeDiskMb(_) => "free_disk_mb",
            SiteChange::CloneCount(_) => "clone_count",
        }
    }

    fn apply(&self, site: &mut SiteState) {
        match self {
            SiteChange::Status(s) => site.status = *s,
            SiteChange::Access(a) => site.access = *a,
            SiteChange::Users(u) => site.users = u.clone(),
            SiteChange::Load(l) => site.load = *l,
            SiteChange::FreeDiskMb(d) => site.free_disk_mb = *d,
            SiteChange::CloneCount(c) => site.clone_count = *c,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mutation {
    pub step: u64,
    pub site: SiteId,
    pub change: SiteChange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MigrationOutcome {
    Arrived,
    SiteDown,
    Prohibited,
}

impl MigrationOutcome {
    pub fn name(self) -> &'static str {
        match self {
            MigrationOutcome::Arrived => "arrived",
            MigrationOutcome::SiteDown => "site_down",
            MigrationOutcome::Prohibited => "prohibited",
        }
    }
}

/// Fully connected set of hosts plus the scripted mutations applied during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    sites: BTreeMap<SiteId, SiteState>,
    launch: SiteId,
    mutations: Vec<Mutation>,
}

impl Network {
    /// Validates names, loads, the launch site and every mutation target.
    /// Mutations are stably sorted by step, keeping file order within a step.
    pub fn new(sites: Vec<SiteState>, launch: SiteId, mut mutations: Vec<Mutation>) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for site in sites {
            if !(0.0..=1.0).contains(&site.load) {
                return Err(ConfigError::LoadOutOfRange(site.load));
            }
            let name = site.name.clone();
            if map.insert(name.clone(), site).is_some() {
                return Err(ConfigError::DuplicateSite(name));
            }
        }
        match map.get(&launch) {
            None => return Err(ConfigError::UndeclaredSite(launch)),
            Some(s) if !s.is_reachable() => return Err(ConfigError::LaunchUnavailable(launch)),
            Some(_) => {}
        }
        for m in &mutations {
            if !map.contains_key(&m.site) {
                return Err(ConfigError::UndeclaredSite(m.site.clone()));
            }
            if let SiteChange::Load(l) = m.change {
                if !(0.0..=1.0).contains(&l) {
                    return Err(ConfigError::LoadOutOfRange(l));
                }
            }
        }
        mutations.sort_by_key(|m| m.step);
        Ok(Self {
            sites: map,
            launch,
            mutations,
        })
    }

    pub fn launch(&self) -> &SiteId {
        &self.launch
    }

    pub fn mutations(&self) -> &[Mutation] {
        &self.mutations
    }

    pub fn sites(&self) -> impl Iterator<Item = &SiteState> {
        self.sites.values()
    }

    /// Site names in lexicographic order.
    pub fn site_ids(&self) -> impl Iterator<Item = &SiteId> {
        self.sites.keys()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, site: &SiteId) -> bool {
        self.sites.contains_key(site)
    }

    pub fn site(&self, site: &SiteId) -> Option<&SiteState> {
        self.sites.get(site)
    }

    pub(crate) fn site_mut(&mut self, site: &SiteId) -> Option<&mut SiteState> {
        self.sites.get_mut(site)
    }

    /// Applies, in file order, every mutation scheduled for exactly `step`.
    pub fn apply_mutations(&mut self, step: u64) {
        let Self { sites, mutations, .. } = self;
        for m in mutations.iter().filter(|m| m.step == step) {
            if let Some(site) = sites.get_mut(&m.site) {
                m.change.apply(site);
            }
        }
    }

    /// Outcome of an attempted transfer. Never changes any site.
    pub fn migrate(&self, current: &SiteId, target: &SiteId) -> Result<MigrationOutcome, ConfigError> {
        let site = self
            .site(target)
            .ok_or_else(|| ConfigError::UndeclaredSite(target.clone()))?;
        if target == current {
            return Err(ConfigError::SelfMigration(target.clone()));
        }
        Ok(match (site.status, site.access) {
            (SiteStatus::Down, _) => MigrationOutcome::SiteDown,
            (SiteStatus::Up, Access::Prohibited) => MigrationOutcome::Prohibited,
            (SiteStatus::Up, Access::Allowed) => MigrationOutcome::Arrived,
        })
    }

    /// The agent's task: names of users logged on the site it occupies.
    pub fn collect_users(&self, site: &SiteId, location: &SiteId) -> Result<Vec<String>, InternalError> {
        if site != location {
            return Err(InternalError(format!(
                "task requested on `{site}` while the agent is on `{location}`"
            )));
        }
        self.site(site)
            .map(|s| s.users.clone())
            .ok_or_else(|| InternalError(format!("agent located on undeclared site `{site}`")))
    }

    /// Clone perception: clones on `site` beyond those this agent placed
    /// itself are residual incarnations and signal a dysfunction.
    pub fn perceive_clone(&self, site: &SiteId, own_clones: u64) -> bool {
        self.residual_clones(site, own_clones) > 0
    }

    pub fn residual_clones(&self, site: &SiteId, own_clones: u64) -> u64 {
        self.site(site)
            .map_or(0, |s| s.clone_count.saturating_sub(own_clones))
    }

    /// Site perception: a snapshot of the site's current state.
    pub fn perceive_site(&self, site: &SiteId) -> Result<SiteState, ConfigError> {
        self.site(site)
            .cloned()
            .ok_or_else(|| ConfigError::UndeclaredSite(site.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn site(name: &str) -> SiteState {
        SiteState::new(name)
    }

    fn net(extra: impl FnOnce(&mut Vec<SiteState>), mutations: Vec<Mutation>) -> Network {
        let mut sites = vec![site("A"), site("B"), site("C")];
        extra(&mut sites);
        Network::new(sites, "A".into(), mutations).unwrap()
    }

    #[test]
    fn migrate_outcomes() {
        let n = net(
            |s| {
                s[1].status = SiteStatus::Down;
                s[1].access = Access::Prohibited;
                s[2].access = Access::Prohibited;
            },
            vec![],
        );
        let a = SiteId::from("A");
        assert_eq!(n.migrate(&a, &"B".into()).unwrap(), MigrationOutcome::SiteDown);
        assert_eq!(n.migrate(&a, &"C".into()).unwrap(), MigrationOutcome::Prohibited);
        assert_eq!(n.migrate(&"B".into(), &a).unwrap(), MigrationOutcome::Arrived);
        assert!(matches!(n.migrate(&a, &"Z".into()), Err(ConfigError::UndeclaredSite(_))));
        assert!(n.migrate(&a, &a).is_err());
    }

    #[test]
    fn collect_users_only_on_current_site() {
        let n = net(|s| s[0].users = vec!["alice".into(), "bob".into()], vec![]);
        let a = SiteId::from("A");
        assert_eq!(n.collect_users(&a, &a).unwrap(), vec!["alice", "bob"]);
        assert!(n.collect_users(&"B".into(), &"B".into()).unwrap().is_empty());
        assert!(n.collect_users(&"B".into(), &a).is_err());
    }

    #[test]
    fn residual_clone_perception() {
        let n = net(|s| s[1].clone_count = 1, vec![]);
        assert!(n.perceive_clone(&"B".into(), 0));
        assert!(!n.perceive_clone(&"A".into(), 0));
        assert!(!n.perceive_clone(&"B".into(), 1));
    }

    #[test]
    fn site_snapshots() {
        let n = net(|s| s[2].status = SiteStatus::Down, vec![]);
        assert_eq!(n.perceive_site(&"C".into()).unwrap().status, SiteStatus::Down);
        assert_eq!(n.perceive_site(&"A".into()).unwrap(), n.perceive_site(&"A".into()).unwrap());
        assert!(n.perceive_site(&"Q".into()).is_err());
    }

    #[test]
    fn mutations_apply_at_their_step_in_file_order() {
        let b = SiteId::from("B");
        let mut n = net(
            |_| {},
            vec![
                Mutation { step: 3, site: b.clone(), change: SiteChange::Load(0.5) },
                Mutation { step: 1, site: b.clone(), change: SiteChange::Status(SiteStatus::Down) },
                Mutation { step: 3, site: b.clone(), change: SiteChange::Load(0.7) },
            ],
        );
        let before = n.clone();
        n.apply_mutations(0);
        assert_eq!(n, before);
        n.apply_mutations(1);
        assert_eq!(n.site(&b).unwrap().status, SiteStatus::Down);
        n.apply_mutations(3);
        assert_eq!(n.site(&b).unwrap().load, 0.7);
    }

    #[test]
    fn construction_errors() {
        let launch_down = Network::new(
            vec![SiteState { status: SiteStatus::Down, ..site("A") }],
            "A".into(),
            vec![],
        );
        assert!(matches!(launch_down, Err(ConfigError::LaunchUnavailable(_))));
        let dup = Network::new(vec![site("A"), site("A")], "A".into(), vec![]);
        assert!(matches!(dup, Err(ConfigError::DuplicateSite(_))));
        let bad_mut = Network::new(
            vec![site("A")],
            "A".into(),
            vec![Mutation { step: 0, site: "X".into(), change: SiteChange::CloneCount(1) }],
        );
        assert!(matches!(bad_mut, Err(ConfigError::UndeclaredSite(_))));
        let bad_load = Network::new(vec![SiteState { load: 1.5, ..site("A") }], "A".into(), vec![]);
        assert!(matches!(bad_load, Err(ConfigError::LoadOutOfRange(_))));
    }
}
