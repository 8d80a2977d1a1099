//! Scenario files: a line-oriented `[section]` / `key = value` grammar.
//!
//! ```text
//! [network]             launch = A ; mutate = <step>,<site>,<field>,<value> (repeatable)
//! [site <name>]         status, access, users, load, free_disk_mb, clone_count
//! [mobility]            policies, route, criterion, allow_non_autonomous
//! [choice.mobility]     pr_keep, pr_override, pr_empty, override
//! [replication]         replication_policies, replication_scope, allow_non_autonomous
//! [choice.replication]  pr_keep, pr_override, pr_empty, override
//! [run]                 seed, max_steps, output_dir
//! ```
//!
//! Lists are comma-separated and `#` starts a comment. Unknown sections and
//! keys are rejected.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::choice::{AttributeDescriptor, AttributeId, ChoiceWeights, PolicyId, PolicyKind, PolicySet};
use crate::error::ConfigError;
use crate::mobility::{plan_route, DirectedCriterion, NavigationMode, NavigationPolicy};
use crate::replication::{ReplicationPolicy, ReplicationRate, ReplicationScope};
use crate::world::{Access, Mutation, Network, SiteChange, SiteId, SiteState, SiteStatus};

pub const DEFAULT_MAX_STEPS: u64 = 1000;
pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("`{key}`: {message}")]
    Semantic { key: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl ScenarioError {
    fn syntax(line: usize, message: impl Into<String>) -> Self {
        ScenarioError::Syntax {
            line,
            message: message.into(),
        }
    }

    fn semantic(key: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioError::Semantic {
            key: key.into(),
            message: message.into(),
        }
    }

    fn config(key: impl Into<String>, err: ConfigError) -> Self {
        Self::semantic(key, err.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationConfig {
    pub policies: PolicySet<ReplicationPolicy>,
    pub weights: ChoiceWeights,
    pub allow_non_autonomous: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub network: Network,
    pub mobility_policies: PolicySet<NavigationPolicy>,
    pub mobility_weights: ChoiceWeights,
    pub allow_non_autonomous: bool,
    pub replication: Option<ReplicationConfig>,
    pub seed: u64,
    pub max_steps: u64,
    pub output_dir: PathBuf,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        parse_scenario(&text)
    }

    /// Every attribute of the agent: the configured autonomous ones plus the
    /// two single-policy perception attributes.
    pub fn attributes(&self) -> Vec<AttributeDescriptor> {
        let mut attrs = vec![self.mobility_policies.descriptor()];
        if let Some(rep) = &self.replication {
            attrs.push(rep.policies.descriptor());
        }
        attrs.push(AttributeDescriptor::fixed(AttributeId::ClonePerception, "residual_clone_check"));
        attrs.push(AttributeDescriptor::fixed(AttributeId::SitePerception, "site_snapshot"));
        attrs
    }
}

#[derive(Debug, Default)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<(String, String, usize)>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        let pos = self.entries.iter().position(|(k, _, _)| k == key)?;
        let (_, v, line) = self.entries.remove(pos);
        Some((v, line))
    }

    fn take_all(&mut self, key: &str) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        while let Some(e) = self.take(key) {
            out.push(e);
        }
        out
    }

    fn finish(self) -> Result<(), ScenarioError> {
        match self.entries.first() {
            Some((k, _, line)) => Err(ScenarioError::syntax(*line, format!("unknown key `{k}` in [{}]", self.name))),
            None => Ok(()),
        }
    }
}

fn split_sections(text: &str) -> Result<Vec<Section>, ScenarioError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let name = header
                .strip_suffix(']')
                .ok_or_else(|| ScenarioError::syntax(line_no, "unterminated section header"))?;
            let name = name.split_whitespace().collect::<Vec<_>>().join(" ");
            if sections.iter().any(|s| s.name == name) {
                return Err(ScenarioError::syntax(line_no, format!("duplicate section [{name}]")));
            }
            sections.push(Section {
                name,
                line: line_no,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ScenarioError::syntax(line_no, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ScenarioError::syntax(line_no, "missing key"));
        }
        let section = sections
            .last_mut()
            .ok_or_else(|| ScenarioError::syntax(line_no, "key outside of any section"))?;
        if key != "mutate" && section.entries.iter().any(|(k, _, _)| k == key) {
            return Err(ScenarioError::syntax(line_no, format!("duplicate key `{key}`")));
        }
        section.entries.push((key.to_string(), value.to_string(), line_no));
    }
    Ok(sections)
}

fn parse_list(key: &str, value: &str) -> Result<Vec<String>, ScenarioError> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|item| {
            let item = item.trim();
            if SiteId::is_valid_name(item) {
                Ok(item.to_string())
            } else {
                Err(ScenarioError::semantic(key, format!("invalid list item `{item}`")))
            }
        })
        .collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ScenarioError> {
    value
        .parse()
        .map_err(|_| ScenarioError::semantic(key, format!("invalid number `{value}`")))
}

fn parse_prob(key: &str, value: &str) -> Result<f64, ScenarioError> {
    let p: f64 = parse_num(key, value)?;
    if !p.is_finite() {
        return Err(ScenarioError::semantic(key, "not a finite number"));
    }
    Ok(p)
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ScenarioError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ScenarioError::semantic(key, format!("expected true or false, got `{value}`"))),
    }
}

fn parse_status(key: &str, value: &str) -> Result<SiteStatus, ScenarioError> {
    match value {
        "up" => Ok(SiteStatus::Up),
        "down" => Ok(SiteStatus::Down),
        _ => Err(ScenarioError::semantic(key, format!("expected up or down, got `{value}`"))),
    }
}

fn parse_access(key: &str, value: &str) -> Result<Access, ScenarioError> {
    match value {
        "allowed" => Ok(Access::Allowed),
        "prohibited" => Ok(Access::Prohibited),
        _ => Err(ScenarioError::semantic(key, format!("expected allowed or prohibited, got `{value}`"))),
    }
}

fn parse_load(key: &str, value: &str) -> Result<f64, ScenarioError> {
    let load = parse_prob(key, value)?;
    if !(0.0..=1.0).contains(&load) {
        return Err(ScenarioError::config(key, ConfigError::LoadOutOfRange(load)));
    }
    Ok(load)
}

fn parse_site(mut section: Section, name: &str) -> Result<SiteState, ScenarioError> {
    if !SiteId::is_valid_name(name) {
        return Err(ScenarioError::syntax(section.line, format!("invalid site name `{name}`")));
    }
    let mut site = SiteState::new(name);
    if let Some((v, _)) = section.take("status") {
        site.status = parse_status("status", &v)?;
    }
    if let Some((v, _)) = section.take("access") {
        site.access = parse_access("access", &v)?;
    }
    if let Some((v, _)) = section.take("users") {
        site.users = parse_list("users", &v)?;
    }
    if let Some((v, _)) = section.take("load") {
        site.load = parse_load("load", &v)?;
    }
    if let Some((v, _)) = section.take("free_disk_mb") {
        site.free_disk_mb = parse_num("free_disk_mb", &v)?;
    }
    if let Some((v, _)) = section.take("clone_count") {
        site.clone_count = parse_num("clone_count", &v)?;
    }
    section.finish()?;
    Ok(site)
}

fn parse_mutation(value: &str, line: usize) -> Result<Mutation, ScenarioError> {
    let parts: Vec<&str> = value.splitn(4, ',').map(str::trim).collect();
    let [step, site, field, v] = parts[..] else {
        return Err(ScenarioError::syntax(line, "mutate expects <step>,<site>,<field>,<value>"));
    };
    let step = parse_num("mutate", step)?;
    let change = match field {
        "status" => SiteChange::Status(parse_status("mutate", v)?),
        "access" => SiteChange::Access(parse_access("mutate", v)?),
        "users" => SiteChange::Users(parse_list("mutate", v)?),
        "load" => SiteChange::Load(parse_load("mutate", v)?),
        "free_disk_mb" => SiteChange::FreeDiskMb(parse_num("mutate", v)?),
        "clone_count" => SiteChange::CloneCount(parse_num("mutate", v)?),
        other => return Err(ScenarioError::semantic("mutate", format!("unknown site field `{other}`"))),
    };
    Ok(Mutation {
        step,
        site: SiteId::new(site),
        change,
    })
}

fn parse_weights<K: PolicyKind>(
    section: Option<Section>,
    set: &PolicySet<K>,
    default_target: PolicyId,
) -> Result<ChoiceWeights, ScenarioError> {
    let Some(mut section) = section else {
        return Ok(ChoiceWeights::default_for(default_target));
    };
    let mut prob = |key: &str| -> Result<f64, ScenarioError> {
        let (v, _) = section
            .take(key)
            .ok_or_else(|| ScenarioError::semantic(key, format!("missing in [{}]", section.name)))?;
        parse_prob(key, &v)
    };
    let (keep, over, empty) = (prob("pr_keep")?, prob("pr_override")?, prob("pr_empty")?);
    let target = match section.take("override") {
        None => default_target,
        Some((v, _)) => match v.parse::<usize>() {
            Ok(i) => PolicyId::new(i),
            Err(_) => set
                .policies()
                .iter()
                .find(|p| p.kind.tag() == v)
                .map(|p| p.id)
                .ok_or_else(|| ScenarioError::semantic("override", format!("no policy named `{v}`")))?,
        },
    };
    section.finish()?;
    let weights = ChoiceWeights::new(keep, over, empty, target).map_err(|e| {
        let key = match e {
            ConfigError::OverrideOutOfRange { .. } => "override",
            _ => "pr_keep",
        };
        ScenarioError::config(key, e)
    })?;
    weights.check_against(set).map_err(|e| ScenarioError::config("override", e))?;
    Ok(weights)
}

fn check_arity(key: &str, count: usize, allow: bool) -> Result<(), ScenarioError> {
    if count < 2 && !allow {
        return Err(ScenarioError::semantic(
            key,
            "a single policy leaves the attribute non-autonomous; set allow_non_autonomous = true",
        ));
    }
    Ok(())
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut network_sec = None;
    let mut sites = Vec::new();
    let mut mobility_sec = None;
    let mut mobility_choice = None;
    let mut replication_sec = None;
    let mut replication_choice = None;
    let mut run_sec = None;

    for section in split_sections(text)? {
        match section.name.as_str() {
            "network" => network_sec = Some(section),
            "mobility" => mobility_sec = Some(section),
            "choice.mobility" => mobility_choice = Some(section),
            "replication" => replication_sec = Some(section),
            "choice.replication" => replication_choice = Some(section),
            "run" => run_sec = Some(section),
            name => match name.strip_prefix("site ") {
                Some(site) => {
                    let site = site.to_string();
                    sites.push(parse_site(section, &site)?);
                }
                None => return Err(ScenarioError::syntax(section.line, format!("unknown section [{name}]"))),
            },
        }
    }

    let mut net = network_sec.ok_or_else(|| ScenarioError::semantic("[network]", "section is required"))?;
    let (launch, _) = net
        .take("launch")
        .ok_or_else(|| ScenarioError::semantic("launch", "missing in [network]"))?;
    let mutations = net
        .take_all("mutate")
        .into_iter()
        .map(|(v, line)| parse_mutation(&v, line))
        .collect::<Result<Vec<_>, _>>()?;
    net.finish()?;
    let launch = SiteId::new(launch);
    let network = Network::new(sites, launch.clone(), mutations).map_err(|e| ScenarioError::config("[network]", e))?;

    let mut mob = mobility_sec.ok_or_else(|| ScenarioError::semantic("[mobility]", "section is required"))?;
    let (policies, _) = mob
        .take("policies")
        .ok_or_else(|| ScenarioError::semantic("policies", "missing in [mobility]"))?;
    let modes = parse_list("policies", &policies)?
        .iter()
        .map(|p| NavigationMode::parse(p).ok_or_else(|| ScenarioError::semantic("policies", format!("unknown navigation policy `{p}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    let route = match mob.take("route") {
        Some((v, _)) => {
            if !modes.contains(&NavigationMode::Route) {
                return Err(ScenarioError::semantic("route", "set but no `route` policy is configured"));
            }
            let hops: Vec<SiteId> = parse_list("route", &v)?.into_iter().map(SiteId::new).collect();
            Some(plan_route(&hops, &launch, &network).map_err(|e| ScenarioError::config("route", e))?)
        }
        None if modes.contains(&NavigationMode::Route) => {
            return Err(ScenarioError::semantic("route", "required by the `route` policy"))
        }
        None => None,
    };
    let criterion = match mob.take("criterion") {
        Some((v, _)) => {
            if !modes.contains(&NavigationMode::Directed) {
                return Err(ScenarioError::semantic("criterion", "set but no `directed` policy is configured"));
            }
            DirectedCriterion::parse(&v)
                .ok_or_else(|| ScenarioError::semantic("criterion", format!("expected least_loaded or most_free_disk, got `{v}`")))?
        }
        None => DirectedCriterion::LeastLoaded,
    };
    let allow_non_autonomous = match mob.take("allow_non_autonomous") {
        Some((v, _)) => parse_bool("allow_non_autonomous", &v)?,
        None => false,
    };
    mob.finish()?;
    check_arity("policies", modes.len(), allow_non_autonomous)?;
    let kinds = modes
        .iter()
        .map(|m| match m {
            NavigationMode::Random => NavigationPolicy::Random,
            NavigationMode::Circular => NavigationPolicy::Circular,
            NavigationMode::Route => NavigationPolicy::Route(route.clone().expect("checked above")),
            NavigationMode::Directed => NavigationPolicy::Directed(criterion),
        })
        .collect();
    let mobility_policies = PolicySet::new(AttributeId::Mobility, kinds).map_err(|e| ScenarioError::config("policies", e))?;
    let default_target = mobility_policies
        .policies()
        .iter()
        .find(|p| p.kind == NavigationPolicy::Random)
        .map_or(PolicyId::new(1), |p| p.id);
    let mobility_weights = parse_weights(mobility_choice, &mobility_policies, default_target)?;

    let replication = match replication_sec {
        None => {
            if let Some(s) = replication_choice {
                return Err(ScenarioError::syntax(s.line, "[choice.replication] without [replication]"));
            }
            None
        }
        Some(mut rep) => {
            let (policies, _) = rep
                .take("replication_policies")
                .ok_or_else(|| ScenarioError::semantic("replication_policies", "missing in [replication]"))?;
            let scope = match rep.take("replication_scope") {
                Some((v, _)) => ReplicationScope::parse(&v).ok_or_else(|| {
                    ScenarioError::semantic("replication_scope", format!("expected all, free_disk>=N or load<=X, got `{v}`"))
                })?,
                None => ReplicationScope::AllAccessible,
            };
            let allow = match rep.take("allow_non_autonomous") {
                Some((v, _)) => parse_bool("allow_non_autonomous", &v)?,
                None => false,
            };
            rep.finish()?;
            let kinds = parse_list("replication_policies", &policies)?
                .iter()
                .map(|p| {
                    ReplicationRate::parse(p)
                        .map(|rate| ReplicationPolicy { rate, scope })
                        .ok_or_else(|| ScenarioError::semantic("replication_policies", format!("unknown replication policy `{p}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            check_arity("replication_policies", kinds.len(), allow)?;
            let policies =
                PolicySet::new(AttributeId::Replication, kinds).map_err(|e| ScenarioError::config("replication_policies", e))?;
            let weights = parse_weights(replication_choice, &policies, PolicyId::new(1))?;
            Some(ReplicationConfig {
                policies,
                weights,
                allow_non_autonomous: allow,
            })
        }
    };

    let (mut seed, mut max_steps, mut output_dir) = (0, DEFAULT_MAX_STEPS, PathBuf::from(DEFAULT_OUTPUT_DIR));
    if let Some(mut run) = run_sec {
        if let Some((v, _)) = run.take("seed") {
            seed = parse_num("seed", &v)?;
        }
        if let Some((v, _)) = run.take("max_steps") {
            max_steps = parse_num("max_steps", &v)?;
            if max_steps == 0 {
                return Err(ScenarioError::semantic("max_steps", "must be positive"));
            }
        }
        if let Some((v, _)) = run.take("output_dir") {
            if v.is_empty() {
                return Err(ScenarioError::semantic("output_dir", "must not be empty"));
            }
            output_dir = PathBuf::from(v);
        }
        run.finish()?;
    }

    Ok(Scenario {
        network,
        mobility_policies,
        mobility_weights,
        allow_non_autonomous,
        replication,
        seed,
        max_steps,
        output_dir,
    })
}

fn render_weights(out: &mut String, section: &str, w: &ChoiceWeights) {
    let _ = writeln!(out, "\n[{section}]");
    let _ = writeln!(out, "pr_keep = {}", w.pr_keep());
    let _ = writeln!(out, "pr_override = {}", w.pr_override());
    let _ = writeln!(out, "pr_empty = {}", w.pr_empty());
    let _ = writeln!(out, "override = {}", w.override_target().index());
}

fn render_change(change: &SiteChange) -> String {
    match change {
        SiteChange::Status(s) => status_name(*s).to_string(),
        SiteChange::Access(a) => access_name(*a).to_string(),
        SiteChange::Users(u) => u.join(","),
        SiteChange::Load(l) => l.to_string(),
        SiteChange::FreeDiskMb(d) => d.to_string(),
        SiteChange::CloneCount(c) => c.to_string(),
    }
}

fn status_name(s: SiteStatus) -> &'static str {
    match s {
        SiteStatus::Up => "up",
        SiteStatus::Down => "down",
    }
}

fn access_name(a: Access) -> &'static str {
    match a {
        Access::Allowed => "allowed",
        Access::Prohibited => "prohibited",
    }
}

/// Canonical text form; `parse_scenario(&render_scenario(s)) == s`.
pub fn render_scenario(s: &Scenario) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[network]\nlaunch = {}", s.network.launch());
    for m in s.network.mutations() {
        let _ = writeln!(out, "mutate = {},{},{},{}", m.step, m.site, m.change.field(), render_change(&m.change));
    }
    for site in s.network.sites() {
        let _ = writeln!(out, "\n[site {}]", site.name);
        let _ = writeln!(out, "status = {}", status_name(site.status));
        let _ = writeln!(out, "access = {}", access_name(site.access));
        let _ = writeln!(out, "users = {}", site.users.join(","));
        let _ = writeln!(out, "load = {}", site.load);
        let _ = writeln!(out, "free_disk_mb = {}", site.free_disk_mb);
        let _ = writeln!(out, "clone_count = {}", site.clone_count);
    }

    let _ = writeln!(out, "\n[mobility]");
    let tags: Vec<&str> = s.mobility_policies.kinds().map(|k| k.tag()).collect();
    let _ = writeln!(out, "policies = {}", tags.join(","));
    let mut route = None;
    let mut criterion = None;
    for kind in s.mobility_policies.kinds() {
        match kind {
            NavigationPolicy::Route(r) => route = Some(r),
            NavigationPolicy::Directed(c) => criterion = Some(*c),
            _ => {}
        }
    }
    if let Some(r) = route {
        let hops: Vec<&str> = r.hops().iter().map(SiteId::as_str).collect();
        let _ = writeln!(out, "route = {}", hops.join(","));
    }
    if let Some(c) = criterion {
        let _ = writeln!(out, "criterion = {}", c.name());
    }
    if s.allow_non_autonomous {
        let _ = writeln!(out, "allow_non_autonomous = true");
    }
    render_weights(&mut out, "choice.mobility", &s.mobility_weights);

    if let Some(rep) = &s.replication {
        let _ = writeln!(out, "\n[replication]");
        let tags: Vec<&str> = rep.policies.kinds().map(|k| k.tag()).collect();
        let _ = writeln!(out, "replication_policies = {}", tags.join(","));
        if let Some(first) = rep.policies.kinds().next() {
            let _ = writeln!(out, "replication_scope = {}", first.scope);
        }
        if rep.allow_non_autonomous {
            let _ = writeln!(out, "allow_non_autonomous = true");
        }
        render_weights(&mut out, "choice.replication", &rep.weights);
    }

    let _ = writeln!(out, "\n[run]");
    let _ = writeln!(out, "seed = {}", s.seed);
    let _ = writeln!(out, "max_steps = {}", s.max_steps);
    let _ = writeln!(out, "output_dir = {}", s.output_dir.display());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[network]
launch = A
[site A]
[site B]
[mobility]
policies = random
allow_non_autonomous = true
";

    #[test]
    fn minimal_file_parses() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.network.len(), 2);
        assert_eq!(s.mobility_policies.len(), 1);
        assert_eq!(s.mobility_weights, ChoiceWeights::default_for(PolicyId::new(1)));
        assert_eq!(s.max_steps, DEFAULT_MAX_STEPS);
        assert_eq!(s.seed, 0);
    }

    #[test]
    fn single_policy_requires_opt_in() {
        let text = MINIMAL.replace("allow_non_autonomous = true\n", "");
        let err = parse_scenario(&text).unwrap_err();
        assert!(matches!(err, ScenarioError::Semantic { ref key, .. } if key == "policies"), "{err}");
    }

    #[test]
    fn weights_must_sum_to_one() {
        let text = format!("{MINIMAL}[choice.mobility]\npr_keep = 0.9\npr_override = 0\npr_empty = 0.2\n");
        let err = parse_scenario(&text).unwrap_err();
        assert!(err.to_string().contains("sum"), "{err}");
    }

    #[test]
    fn route_names_undeclared_site() {
        let text = MINIMAL.replace("policies = random", "policies = random,route\nroute = B,X");
        let err = parse_scenario(&text).unwrap_err();
        assert!(matches!(err, ScenarioError::Semantic { ref key, ref message } if key == "route" && message.contains('X')));
    }

    #[test]
    fn unknown_keys_and_sections_fail() {
        let err = parse_scenario(&MINIMAL.replace("[site B]", "[site B]\nlaod = 0.5")).unwrap_err();
        assert!(matches!(err, ScenarioError::Syntax { line: 5, .. }), "{err}");
        let err = parse_scenario(&format!("{MINIMAL}[chioce.mobility]\n")).unwrap_err();
        assert!(err.to_string().contains("unknown section"));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_scenario("[network]\nlaunch A\n").unwrap_err();
        assert_eq!(err, ScenarioError::syntax(2, "expected `key = value`"));
        let err = parse_scenario("launch = A\n").unwrap_err();
        assert!(matches!(err, ScenarioError::Syntax { line: 1, .. }));
    }

    #[test]
    fn override_by_name_or_index() {
        let base = MINIMAL.replace("policies = random", "policies = circular,random");
        let s = parse_scenario(&base).unwrap();
        assert_eq!(s.mobility_weights.override_target(), PolicyId::new(2));
        let s = parse_scenario(&format!("{base}[choice.mobility]\npr_keep=0.5\npr_override=0.5\npr_empty=0\noverride = circular\n")).unwrap();
        assert_eq!(s.mobility_weights.override_target(), PolicyId::new(1));
        let err = parse_scenario(&format!("{base}[choice.mobility]\npr_keep=0.5\npr_override=0.5\npr_empty=0\noverride = 3\n")).unwrap_err();
        assert!(matches!(err, ScenarioError::Semantic { ref key, .. } if key == "override"));
    }

    #[test]
    fn mutations_and_replication() {
        let text = "\
[network]
launch = A
mutate = 2,B,users,x,y
mutate = 1,B,status,down
[site A]
[site B]
free_disk_mb = 900
[mobility]
policies = random,directed
criterion = most_free_disk
[replication]
replication_policies = at_least_one,at_most_one
replication_scope = free_disk>=500
[choice.replication]
pr_keep = 1
pr_override = 0
pr_empty = 0
[run]
seed = 9
max_steps = 50
output_dir = results
";
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.network.mutations().len(), 2);
        assert_eq!(s.network.mutations()[0].step, 1);
        assert_eq!(s.network.mutations()[1].change, SiteChange::Users(vec!["x".into(), "y".into()]));
        let rep = s.replication.as_ref().unwrap();
        assert_eq!(rep.policies.len(), 2);
        assert_eq!(s.attributes().len(), 4);
        assert_eq!(parse_scenario(&render_scenario(&s)).unwrap(), s);
    }

    #[test]
    fn replication_choice_needs_replication() {
        let err = parse_scenario(&format!("{MINIMAL}[choice.replication]\npr_keep=1\npr_override=0\npr_empty=0\n")).unwrap_err();
        assert!(matches!(err, ScenarioError::Syntax { .. }));
    }
}
