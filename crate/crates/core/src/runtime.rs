//! The agent lifecycle: choice modules, navigation, task, trace and report.
//!
//! Each step runs, in order: scripted site mutations; on arrival the clone
//! check and the user-collection task; the step budget check; the
//! replication choice module when configured; the mobility choice module,
//! which halts the agent on `P0`; finally at most one hop.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::choice::{
    autonomous_choice, AttributeId, Branch, ChoiceState, ChoiceWeights, Decision, PolicyId, PolicyKind, PolicySet,
};
use crate::error::{ConfigError, InternalError};
use crate::mobility::{NavigationPolicy, NavigationState, StepOutcome};
use crate::replication::{apply_plan, plan_replication, CloneMap};
use crate::report::{HaltReason, Report, ReportBuilder};
use crate::rng::RngStream;
use crate::scenario::{ReplicationConfig, Scenario};
use crate::trace::{Trace, TraceEvent, TraceKind};
use crate::world::{MigrationOutcome, Network, SiteId};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Internal(#[from] InternalError),
}

/// Per-run counters, collected alongside the trace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunStats {
    pub mobility_branches: BTreeMap<Branch, u64>,
    pub replication_branches: BTreeMap<Branch, u64>,
    pub mobility_choices: u64,
    pub clones_created: u64,
}

#[derive(Debug, Clone)]
pub struct Run {
    pub seed: u64,
    pub report: Report,
    pub trace: Trace,
    pub stats: RunStats,
    /// Network state when the agent halted.
    pub network: Network,
    /// Clones the agent placed itself.
    pub own_clones: CloneMap,
}

#[derive(Debug, Clone)]
pub struct AgentState {
    pub location: SiteId,
    pub nav: Option<NavigationState>,
    pub choice_states: BTreeMap<AttributeId, ChoiceState>,
    pub rng_streams: BTreeMap<AttributeId, RngStream>,
    /// Draws for policy parameters (random transfer destinations).
    pub nav_rng: RngStream,
    pub step: u64,
    pub halted: Option<HaltReason>,
}

impl AgentState {
    fn new(launch: SiteId, seed: u64, with_replication: bool) -> Self {
        let mut attrs = vec![AttributeId::Mobility];
        if with_replication {
            attrs.push(AttributeId::Replication);
        }
        Self {
            location: launch,
            nav: None,
            choice_states: attrs.iter().map(|a| (*a, ChoiceState::new())).collect(),
            rng_streams: attrs
                .iter()
                .map(|a| (*a, RngStream::derive(seed, &format!("choice.{a}"))))
                .collect(),
            nav_rng: RngStream::derive(seed, "nav.mobility"),
            step: 0,
            halted: None,
        }
    }
}

struct Engine<'a> {
    scenario: &'a Scenario,
    network: Network,
    agent: AgentState,
    own_clones: CloneMap,
    trace: Trace,
    report: ReportBuilder,
    stats: RunStats,
}

/// Runs the scenario under its own seed.
pub fn run_agent(scenario: &Scenario) -> Result<Run, RunError> {
    run_agent_with_seed(scenario, scenario.seed)
}

/// Runs the scenario under `seed`. The scenario and seed are the only inputs.
pub fn run_agent_with_seed(scenario: &Scenario, seed: u64) -> Result<Run, RunError> {
    let launch = scenario.network.launch().clone();
    let mut engine = Engine {
        scenario,
        network: scenario.network.clone(),
        agent: AgentState::new(launch.clone(), seed, scenario.replication.is_some()),
        own_clones: CloneMap::new(),
        trace: Trace::new(),
        report: ReportBuilder::new(launch),
        stats: RunStats::default(),
    };
    let (reason, steps) = engine.run()?;
    let Engine {
        network,
        agent,
        own_clones,
        trace,
        report,
        stats,
        ..
    } = engine;
    Ok(Run {
        seed,
        report: report.finish(agent.location, reason, steps),
        trace,
        stats,
        network,
        own_clones,
    })
}

enum Navigation {
    Inhibited,
    Moved,
    Stayed,
}

fn policy_tag<K: PolicyKind>(set: &PolicySet<K>, id: PolicyId) -> &'static str {
    if id.is_empty() {
        "empty"
    } else {
        set.get(id).map_or("?", |p| p.kind.tag())
    }
}

impl Engine<'_> {
    fn emit(&mut self, kind: TraceKind, site: &SiteId, detail: impl Into<String>) {
        self.trace.push(TraceEvent::new(self.agent.step, kind, site, detail));
    }

    fn halt(&mut self, reason: HaltReason, steps: u64) -> (HaltReason, u64) {
        self.agent.halted = Some(reason);
        let here = self.agent.location.clone();
        self.emit(TraceKind::Halt, &here, format!("reason={reason}"));
        (reason, steps)
    }

    fn run(&mut self) -> Result<(HaltReason, u64), RunError> {
        let mut arrived = true;
        loop {
            let step = self.agent.step;
            self.network.apply_mutations(step);
            if arrived {
                self.on_arrival()?;
                arrived = false;
            }
            if step >= self.scenario.max_steps {
                return Ok(self.halt(HaltReason::MaxSteps, self.scenario.max_steps));
            }
            let scenario = self.scenario;
            if let Some(rep) = &scenario.replication {
                self.replicate(rep)?;
            }
            if self.network.site_ids().all(|s| *s == self.agent.location) {
                return Ok(self.halt(HaltReason::Stranded, step + 1));
            }
            match self.navigate()? {
                Navigation::Inhibited => return Ok((HaltReason::EmptyPolicy, step + 1)),
                Navigation::Moved => arrived = true,
                Navigation::Stayed => {}
            }
            self.agent.step += 1;
        }
    }

    fn on_arrival(&mut self) -> Result<(), RunError> {
        let here = self.agent.location.clone();
        self.emit(TraceKind::Arrive, &here, "");
        let dysfunction = self.network.perceive_clone(&here, self.own_clones.get(&here));
        self.emit(TraceKind::CloneCheck, &here, format!("dysfunction={dysfunction}"));
        if dysfunction {
            self.report.dysfunction(&here);
        }
        let users = self.network.collect_users(&here, &self.agent.location)?;
        self.emit(TraceKind::Task, &here, format!("users={}", users.join(",")));
        self.report.task_result(&here, users);
        Ok(())
    }

    fn choose<K: PolicyKind>(
        &mut self,
        attribute: AttributeId,
        set: &PolicySet<K>,
        weights: &ChoiceWeights,
    ) -> Result<Decision, RunError> {
        let state = self.agent.choice_states[&attribute];
        let rng = self
            .agent
            .rng_streams
            .get_mut(&attribute)
            .ok_or_else(|| InternalError(format!("no random stream for {attribute}")))?;
        let decision = autonomous_choice(&state, set, weights, rng)?;
        let here = self.agent.location.clone();
        let mut det = TraceEvent::new(
            self.agent.step,
            TraceKind::DetChoice,
            &here,
            format!("attr={attribute} policy={}", policy_tag(set, decision.selected)),
        );
        det.policy_selected = Some(decision.selected);
        self.trace.push(det);
        let mut nondet = TraceEvent::new(
            self.agent.step,
            TraceKind::NondetChoice,
            &here,
            format!(
                "attr={attribute} branch={} policy={}",
                decision.branch.name(),
                policy_tag(set, decision.elected)
            ),
        );
        nondet.policy_selected = Some(decision.selected);
        nondet.policy_final = Some(decision.elected);
        self.trace.push(nondet);
        Ok(decision)
    }

    fn replicate(&mut self, rep: &ReplicationConfig) -> Result<(), RunError> {
        let decision = self.choose(AttributeId::Replication, &rep.policies, &rep.weights)?;
        *self.stats.replication_branches.entry(decision.branch).or_default() += 1;
        if decision.elected.is_empty() {
            return Ok(());
        }
        let policy = rep
            .policies
            .get(decision.elected)
            .ok_or_else(|| InternalError(format!("replication elected unknown {}", decision.elected)))?
            .kind;
        let plan = plan_replication(&policy, &self.network, &CloneMap::from_network(&self.network));
        apply_plan(&mut self.network, &plan, &mut self.own_clones);
        self.stats.clones_created += plan.iter().map(|(_, n)| n).sum::<u64>();
        let created: Vec<String> = plan.iter().map(|(s, n)| format!("{s}:{n}")).collect();
        let here = self.agent.location.clone();
        self.emit(
            TraceKind::ReplicationPlan,
            &here,
            format!("attr=replication policy={} created={}", policy.rate.name(), created.join(",")),
        );
        let state = self.agent.choice_states.entry(AttributeId::Replication).or_default();
        state.commit(decision.elected);
        state.mark_finished();
        Ok(())
    }

    /// One activation of the mobility choice module and at most one hop.
    fn navigate(&mut self) -> Result<Navigation, RunError> {
        let scenario = self.scenario;
        let set = &scenario.mobility_policies;
        let decision = self.choose(AttributeId::Mobility, set, &scenario.mobility_weights)?;
        self.stats.mobility_choices += 1;
        *self.stats.mobility_branches.entry(decision.branch).or_default() += 1;
        if decision.elected.is_empty() {
            // Inhibition: any route in progress is abandoned where the agent stands.
            self.agent.nav = None;
            self.halt(HaltReason::EmptyPolicy, self.agent.step + 1);
            return Ok(Navigation::Inhibited);
        }

        let policy: &NavigationPolicy = &set
            .get(decision.elected)
            .ok_or_else(|| InternalError(format!("mobility elected unknown {}", decision.elected)))?
            .kind;
        let state = self.agent.choice_states[&AttributeId::Mobility];
        let continuing =
            state.current() == Some(decision.elected) && !state.finished() && self.agent.nav.is_some();
        self.agent
            .choice_states
            .entry(AttributeId::Mobility)
            .or_default()
            .commit(decision.elected);
        let here = self.agent.location.clone();
        if !continuing {
            match NavigationState::start(policy, &self.network, &here) {
                Ok(nav) => self.agent.nav = Some(nav),
                Err(e) => {
                    self.agent.nav = None;
                    self.finish_mobility();
                    self.emit(TraceKind::HopResult, &here, format!("outcome=no_hop note={}", note(&e.to_string())));
                    return Ok(Navigation::Stayed);
                }
            }
        }

        let nav = self.agent.nav.as_mut().expect("navigation state set above");
        let outcome = nav.step_policy(&self.network, &here, &mut self.agent.nav_rng);
        let exhausted = nav.is_exhausted();
        let moved = match outcome {
            StepOutcome::Hop(target) => {
                self.emit(TraceKind::HopAttempt, &target, format!("from={here} policy={}", policy.tag()));
                let result = self.network.migrate(&here, &target)?;
                self.emit(TraceKind::HopResult, &target, format!("outcome={}", result.name()));
                if result == MigrationOutcome::Arrived {
                    self.agent.location = target;
                    true
                } else {
                    self.report.failed_hop(&target, result);
                    false
                }
            }
            StepOutcome::Finished => {
                self.emit(TraceKind::HopResult, &here, "outcome=no_hop note=policy_complete");
                self.finish_mobility();
                return Ok(Navigation::Stayed);
            }
            StepOutcome::Failed(e) => {
                self.emit(TraceKind::HopResult, &here, format!("outcome=no_hop note={}", note(&e.to_string())));
                self.finish_mobility();
                return Ok(Navigation::Stayed);
            }
        };
        if exhausted {
            self.finish_mobility();
        }
        Ok(if moved { Navigation::Moved } else { Navigation::Stayed })
    }

    fn finish_mobility(&mut self) {
        if let Some(state) = self.agent.choice_states.get_mut(&AttributeId::Mobility) {
            state.mark_finished();
        }
    }
}

/// Trace details are space-separated `key=value` pairs.
fn note(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join("_")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::render_report;
    use crate::scenario::parse_scenario;
    use crate::trace::emit_trace;

    fn scenario(extra_mobility: &str, choice: &str, run: &str) -> Scenario {
        let text = format!(
            "[network]\nlaunch = A\n[site A]\nusers = alice\n[site B]\nusers = bob\n[site C]\n\
             [mobility]\n{extra_mobility}\n[choice.mobility]\n{choice}\n[run]\n{run}\n"
        );
        parse_scenario(&text).unwrap()
    }

    #[test]
    fn always_empty_halts_at_launch_after_one_choice() {
        let s = scenario("policies = random,circular", "pr_keep=0\npr_override=0\npr_empty=1", "seed=1");
        let run = run_agent(&s).unwrap();
        assert_eq!(run.report.halt_reason, HaltReason::EmptyPolicy);
        assert_eq!(run.report.steps, 1);
        assert_eq!(run.report.halted_at, SiteId::from("A"));
        assert_eq!(run.report.visited, vec![(SiteId::from("A"), vec!["alice".to_string()])]);
        assert_eq!(run.stats.mobility_choices, 1);
        let last = run.trace.events().last().unwrap();
        assert_eq!(last.kind, TraceKind::Halt);
        assert!(!run.trace.events().iter().any(|e| e.kind == TraceKind::HopAttempt));
    }

    #[test]
    fn max_steps_bounds_the_run() {
        let s = scenario("policies = random,circular", "pr_keep=1\npr_override=0\npr_empty=0", "seed=1\nmax_steps=25");
        let run = run_agent(&s).unwrap();
        assert_eq!(run.report.halt_reason, HaltReason::MaxSteps);
        assert_eq!(run.report.steps, 25);
        assert_eq!(run.stats.mobility_choices, 25);
    }

    #[test]
    fn single_site_is_stranded() {
        let text = "[network]\nlaunch = A\n[site A]\n[mobility]\npolicies = random,circular\n";
        let run = run_agent(&parse_scenario(text).unwrap()).unwrap();
        assert_eq!(run.report.halt_reason, HaltReason::Stranded);
        assert_eq!(run.report.steps, 1);
    }

    #[test]
    fn same_seed_same_bytes() {
        let s = scenario("policies = random,circular", "pr_keep=0.8\npr_override=0.1\npr_empty=0.1", "seed=77");
        let a = run_agent(&s).unwrap();
        let b = run_agent(&s).unwrap();
        assert_eq!(emit_trace(&a.trace), emit_trace(&b.trace));
        assert_eq!(render_report(&a.report), render_report(&b.report));
    }

    #[test]
    fn directed_with_no_candidate_notes_and_moves_on() {
        let text = "[network]\nlaunch = A\n[site A]\n[site B]\nstatus = down\n\
                    [mobility]\npolicies = directed,random\n\
                    [choice.mobility]\npr_keep=1\npr_override=0\npr_empty=0\n[run]\nmax_steps=2\n";
        let run = run_agent(&parse_scenario(text).unwrap()).unwrap();
        let first_result = run.trace.events().iter().find(|e| e.kind == TraceKind::HopResult).unwrap();
        assert_eq!(first_result.detail_value("outcome"), Some("no_hop"));
        let det: Vec<_> = run
            .trace
            .events()
            .iter()
            .filter(|e| e.kind == TraceKind::DetChoice)
            .map(|e| e.policy_selected.unwrap().index())
            .collect();
        assert_eq!(det, vec![1, 2]);
        assert_eq!(run.report.inaccessible, vec![SiteId::from("B")]);
    }

    #[test]
    fn override_interrupts_circular_route() {
        // Override always forces random; circular never gets to continue.
        let s = scenario(
            "policies = circular,random",
            "pr_keep=0\npr_override=1\npr_empty=0\noverride=random",
            "seed=3\nmax_steps=10",
        );
        let run = run_agent(&s).unwrap();
        for e in run.trace.events().iter().filter(|e| e.kind == TraceKind::HopAttempt) {
            assert_eq!(e.detail_value("policy"), Some("random"));
        }
    }

    #[test]
    fn mutation_takes_site_down_mid_run() {
        let text = "[network]\nlaunch = A\nmutate = 1,C,status,down\n[site A]\n[site B]\n[site C]\n\
                    [mobility]\npolicies = circular\nallow_non_autonomous = true\n\
                    [choice.mobility]\npr_keep=1\npr_override=0\npr_empty=0\n[run]\nmax_steps=3\n";
        let run = run_agent(&parse_scenario(text).unwrap()).unwrap();
        assert_eq!(run.report.inaccessible, vec![SiteId::from("C")]);
        assert_eq!(run.report.halted_at, SiteId::from("A"));
    }
}
