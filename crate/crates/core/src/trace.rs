//! Append-only event trace and its tab-separated rendering.

use std::fmt::Write as _;

use crate::choice::PolicyId;
use crate::world::SiteId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceKind {
    Arrive,
    Task,
    CloneCheck,
    DetChoice,
    NondetChoice,
    HopAttempt,
    HopResult,
    ReplicationPlan,
    Halt,
}

impl TraceKind {
    pub fn name(self) -> &'static str {
        match self {
            TraceKind::Arrive => "arrive",
            TraceKind::Task => "task",
            TraceKind::CloneCheck => "clone_check",
            TraceKind::DetChoice => "det_choice",
            TraceKind::NondetChoice => "nondet_choice",
            TraceKind::HopAttempt => "hop_attempt",
            TraceKind::HopResult => "hop_result",
            TraceKind::ReplicationPlan => "replication_plan",
            TraceKind::Halt => "halt",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub step: u64,
    pub kind: TraceKind,
    pub site: SiteId,
    pub policy_selected: Option<PolicyId>,
    pub policy_final: Option<PolicyId>,
    pub detail: String,
}

impl TraceEvent {
    pub fn new(step: u64, kind: TraceKind, site: &SiteId, detail: impl Into<String>) -> Self {
        Self {
            step,
            kind,
            site: site.clone(),
            policy_selected: None,
            policy_final: None,
            detail: detail.into(),
        }
    }

    /// Value of `key=` inside the detail column.
    pub fn detail_value(&self, key: &str) -> Option<&str> {
        self.detail.split(' ').find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    events: Vec<TraceEvent>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, event: TraceEvent) {
        debug_assert!(self.events.last().is_none_or(|last| last.step <= event.step));
        self.events.push(event);
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

fn policy_col(p: Option<PolicyId>) -> String {
    p.map(|p| p.to_string()).unwrap_or_default()
}

/// One line per event: step, kind, site, selected, final, detail.
pub fn emit_trace(trace: &Trace) -> String {
    let mut out = String::new();
    for e in &trace.events {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            e.step,
            e.kind.name(),
            e.site,
            policy_col(e.policy_selected),
            policy_col(e.policy_final),
            e.detail
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halt_line_format() {
        let mut t = Trace::new();
        t.push(TraceEvent::new(4, TraceKind::Halt, &"B".into(), "reason=empty_policy"));
        assert_eq!(emit_trace(&t), "4\thalt\tB\t\t\treason=empty_policy\n");
    }

    #[test]
    fn policy_columns() {
        let mut e = TraceEvent::new(0, TraceKind::NondetChoice, &"A".into(), "attr=mobility branch=empty policy=empty");
        e.policy_selected = Some(PolicyId::new(2));
        e.policy_final = Some(PolicyId::EMPTY);
        let mut t = Trace::new();
        t.push(e);
        assert_eq!(emit_trace(&t), "0\tnondet_choice\tA\tP2\tP0\tattr=mobility branch=empty policy=empty\n");
        assert_eq!(t.events()[0].detail_value("branch"), Some("empty"));
        assert_eq!(t.events()[0].detail_value("bran"), None);
    }
}
