//! The end-of-run report, rendered as a mail-style text.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use crate::world::{MigrationOutcome, SiteId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HaltReason {
    EmptyPolicy,
    MaxSteps,
    Stranded,
}

impl HaltReason {
    pub const ALL: [HaltReason; 3] = [HaltReason::EmptyPolicy, HaltReason::MaxSteps, HaltReason::Stranded];

    pub fn name(self) -> &'static str {
        match self {
            HaltReason::EmptyPolicy => "empty_policy",
            HaltReason::MaxSteps => "max_steps",
            HaltReason::Stranded => "stranded",
        }
    }
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub launch: SiteId,
    pub visited: Vec<(SiteId, Vec<String>)>,
    pub inaccessible: Vec<SiteId>,
    pub prohibited: Vec<SiteId>,
    pub dysfunctions: Vec<SiteId>,
    pub halted_at: SiteId,
    pub halt_reason: HaltReason,
    pub steps: u64,
}

/// Accumulates a report during a run. Each site lands in the category of
/// its first outcome; every list keeps first-occurrence order.
#[derive(Debug, Clone)]
pub(crate) struct ReportBuilder {
    launch: SiteId,
    categorized: HashSet<SiteId>,
    flagged: HashSet<SiteId>,
    visited: Vec<(SiteId, Vec<String>)>,
    inaccessible: Vec<SiteId>,
    prohibited: Vec<SiteId>,
    dysfunctions: Vec<SiteId>,
}

impl ReportBuilder {
    pub(crate) fn new(launch: SiteId) -> Self {
        Self {
            launch,
            categorized: HashSet::new(),
            flagged: HashSet::new(),
            visited: Vec::new(),
            inaccessible: Vec::new(),
            prohibited: Vec::new(),
            dysfunctions: Vec::new(),
        }
    }

    pub(crate) fn task_result(&mut self, site: &SiteId, users: Vec<String>) {
        if self.categorized.insert(site.clone()) {
            self.visited.push((site.clone(), users));
        }
    }

    pub(crate) fn failed_hop(&mut self, site: &SiteId, outcome: MigrationOutcome) {
        let list = match outcome {
            MigrationOutcome::Arrived => return,
            MigrationOutcome::SiteDown => &mut self.inaccessible,
            MigrationOutcome::Prohibited => &mut self.prohibited,
        };
        if self.categorized.insert(site.clone()) {
            list.push(site.clone());
        }
    }

    pub(crate) fn dysfunction(&mut self, site: &SiteId) {
        if self.flagged.insert(site.clone()) {
            self.dysfunctions.push(site.clone());
        }
    }

    pub(crate) fn finish(self, halted_at: SiteId, halt_reason: HaltReason, steps: u64) -> Report {
        Report {
            launch: self.launch,
            visited: self.visited,
            inaccessible: self.inaccessible,
            prohibited: self.prohibited,
            dysfunctions: self.dysfunctions,
            halted_at,
            halt_reason,
            steps,
        }
    }
}

pub fn render_report(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "AGENT REPORT");
    let _ = writeln!(out, "launch: {}", report.launch);
    let _ = writeln!(out, "visited:");
    for (site, users) in &report.visited {
        if users.is_empty() {
            let _ = writeln!(out, "  {site}:");
        } else {
            let _ = writeln!(out, "  {site}: {}", users.join(","));
        }
    }
    for (title, sites) in [
        ("inaccessible", &report.inaccessible),
        ("prohibited", &report.prohibited),
        ("dysfunctions", &report.dysfunctions),
    ] {
        let _ = writeln!(out, "{title}:");
        for site in sites {
            let _ = writeln!(out, "  {site}");
        }
    }
    let _ = writeln!(out, "halted_at: {} reason={}", report.halted_at, report.halt_reason);
    let _ = writeln!(out, "steps: {}", report.steps);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sections_keep_headers() {
        let r = ReportBuilder::new("A".into()).finish("A".into(), HaltReason::EmptyPolicy, 1);
        assert_eq!(
            render_report(&r),
            "AGENT REPORT\nlaunch: A\nvisited:\ninaccessible:\nprohibited:\ndysfunctions:\nhalted_at: A reason=empty_policy\nsteps: 1\n"
        );
    }

    #[test]
    fn first_outcome_wins() {
        let mut b = ReportBuilder::new("A".into());
        b.task_result(&"A".into(), vec!["alice".into()]);
        b.failed_hop(&"B".into(), MigrationOutcome::SiteDown);
        b.task_result(&"B".into(), vec!["bob".into()]);
        b.failed_hop(&"A".into(), MigrationOutcome::Prohibited);
        b.task_result(&"A".into(), vec!["other".into()]);
        b.dysfunction(&"A".into());
        b.dysfunction(&"A".into());
        let r = b.finish("A".into(), HaltReason::MaxSteps, 9);
        assert_eq!(r.visited, vec![(SiteId::from("A"), vec!["alice".to_string()])]);
        assert_eq!(r.inaccessible, vec![SiteId::from("B")]);
        assert!(r.prohibited.is_empty());
        assert_eq!(r.dysfunctions.len(), 1);
    }
}
