//! Many independent runs of one scenario over consecutive seeds.
//!
//! With the `parallel` feature (default) runs are spread over the rayon
//! pool; without it they run in a plain loop. Results are collected in seed
//! order and aggregated afterwards, so both paths print the same table.

use std::collections::BTreeMap;
use std::fmt::Write as _;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::choice::Branch;
use crate::report::HaltReason;
use crate::runtime::{run_agent_with_seed, Run, RunError};
use crate::scenario::Scenario;

fn seed_of(base_seed: u64, i: u64) -> u64 {
    base_seed.wrapping_add(i)
}

pub fn map_runs_sequential<T, F>(scenario: &Scenario, runs: u64, base_seed: u64, f: F) -> Result<Vec<T>, RunError>
where
    F: Fn(Run) -> T,
{
    (0..runs)
        .map(|i| run_agent_with_seed(scenario, seed_of(base_seed, i)).map(&f))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn map_runs_parallel<T, F>(scenario: &Scenario, runs: u64, base_seed: u64, f: F) -> Result<Vec<T>, RunError>
where
    T: Send,
    F: Fn(Run) -> T + Sync + Send,
{
    (0..runs)
        .into_par_iter()
        .map(|i| run_agent_with_seed(scenario, seed_of(base_seed, i)).map(&f))
        .collect()
}

/// Runs seeds `base_seed..base_seed + runs` and maps each run, in seed order.
pub fn map_runs<T, F>(scenario: &Scenario, runs: u64, base_seed: u64, f: F) -> Result<Vec<T>, RunError>
where
    T: Send,
    F: Fn(Run) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    return map_runs_parallel(scenario, runs, base_seed, f);
    #[cfg(not(feature = "parallel"))]
    return map_runs_sequential(scenario, runs, base_seed, f);
}

/// What a sweep keeps from each run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSummary {
    pub seed: u64,
    pub steps: u64,
    pub halt_reason: HaltReason,
    pub mobility_choices: u64,
    pub mobility_branches: BTreeMap<Branch, u64>,
    pub replication_branches: BTreeMap<Branch, u64>,
}

impl RunSummary {
    fn of(run: Run) -> Self {
        Self {
            seed: run.seed,
            steps: run.report.steps,
            halt_reason: run.report.halt_reason,
            mobility_choices: run.stats.mobility_choices,
            mobility_branches: run.stats.mobility_branches,
            replication_branches: run.stats.replication_branches,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub runs: u64,
    pub base_seed: u64,
    pub with_replication: bool,
    pub mobility_branches: BTreeMap<Branch, u64>,
    pub replication_branches: BTreeMap<Branch, u64>,
    pub mobility_choices: u64,
    pub total_steps: u64,
    pub halt_counts: BTreeMap<HaltReason, u64>,
}

impl SweepSummary {
    pub fn aggregate(runs: &[RunSummary], base_seed: u64, with_replication: bool) -> Self {
        let mut s = Self {
            runs: runs.len() as u64,
            base_seed,
            with_replication,
            mobility_branches: Branch::ALL.iter().map(|b| (*b, 0)).collect(),
            replication_branches: Branch::ALL.iter().map(|b| (*b, 0)).collect(),
            mobility_choices: 0,
            total_steps: 0,
            halt_counts: HaltReason::ALL.iter().map(|h| (*h, 0)).collect(),
        };
        for r in runs {
            for (b, n) in &r.mobility_branches {
                *s.mobility_branches.entry(*b).or_default() += n;
            }
            for (b, n) in &r.replication_branches {
                *s.replication_branches.entry(*b).or_default() += n;
            }
            s.mobility_choices += r.mobility_choices;
            s.total_steps += r.steps;
            *s.halt_counts.entry(r.halt_reason).or_default() += 1;
        }
        s
    }

    pub fn mean_steps(&self) -> f64 {
        self.total_steps as f64 / self.runs.max(1) as f64
    }

    pub fn mean_mobility_choices(&self) -> f64 {
        self.mobility_choices as f64 / self.runs.max(1) as f64
    }

    /// Empirical frequency of a mobility branch over all mobility choices.
    pub fn mobility_frequency(&self, branch: Branch) -> f64 {
        self.mobility_branches[&branch] as f64 / self.mobility_choices.max(1) as f64
    }
}

fn summarize(scenario: &Scenario, runs: Vec<RunSummary>, base_seed: u64) -> SweepSummary {
    SweepSummary::aggregate(&runs, base_seed, scenario.replication.is_some())
}

pub fn run_sweep(scenario: &Scenario, runs: u64, base_seed: u64) -> Result<SweepSummary, RunError> {
    let per_run = map_runs(scenario, runs, base_seed, RunSummary::of)?;
    Ok(summarize(scenario, per_run, base_seed))
}

pub fn run_sweep_sequential(scenario: &Scenario, runs: u64, base_seed: u64) -> Result<SweepSummary, RunError> {
    let per_run = map_runs_sequential(scenario, runs, base_seed, RunSummary::of)?;
    Ok(summarize(scenario, per_run, base_seed))
}

fn write_branches(out: &mut String, attr: &str, counts: &BTreeMap<Branch, u64>) {
    let total: u64 = counts.values().sum();
    let _ = writeln!(out, "{attr}_choices\t{total}");
    for b in Branch::ALL {
        let n = counts.get(&b).copied().unwrap_or(0);
        let _ = writeln!(out, "{attr}\t{}\t{n}\t{:.6}", b.name(), n as f64 / total.max(1) as f64);
    }
}

/// Tab-separated frequency table.
pub fn render_sweep(s: &SweepSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "runs\t{}", s.runs);
    let _ = writeln!(out, "base_seed\t{}", s.base_seed);
    write_branches(&mut out, "mobility", &s.mobility_branches);
    if s.with_replication {
        write_branches(&mut out, "replication", &s.replication_branches);
    }
    let _ = writeln!(out, "mean_steps\t{:.6}", s.mean_steps());
    let _ = writeln!(out, "mean_mobility_choices\t{:.6}", s.mean_mobility_choices());
    for h in HaltReason::ALL {
        let _ = writeln!(out, "halt\t{}\t{}", h.name(), s.halt_counts[&h]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    fn scenario(choice: &str, max_steps: u64) -> Scenario {
        parse_scenario(&format!(
            "[network]\nlaunch = A\n[site A]\n[site B]\n[site C]\n[mobility]\npolicies = random,circular\n\
             [choice.mobility]\n{choice}\n[run]\nmax_steps = {max_steps}\n"
        ))
        .unwrap()
    }

    #[test]
    fn single_run_matches_its_own_counts() {
        let s = scenario("pr_keep=0.8\npr_override=0.1\npr_empty=0.1", 1000);
        let sweep = run_sweep(&s, 1, 17).unwrap();
        let run = run_agent_with_seed(&s, 17).unwrap();
        assert_eq!(sweep.mobility_choices, run.stats.mobility_choices);
        assert_eq!(sweep.total_steps, run.report.steps);
        for b in Branch::ALL {
            assert_eq!(sweep.mobility_branches[&b], run.stats.mobility_branches.get(&b).copied().unwrap_or(0));
        }
        assert_eq!(sweep.halt_counts[&run.report.halt_reason], 1);
    }

    #[test]
    fn no_inhibition_means_budget_halts() {
        let s = scenario("pr_keep=0.9\npr_override=0.1\npr_empty=0", 100);
        let sweep = run_sweep(&s, 50, 0).unwrap();
        assert_eq!(sweep.halt_counts[&HaltReason::MaxSteps], 50);
        assert_eq!(sweep.halt_counts[&HaltReason::EmptyPolicy], 0);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let s = scenario("pr_keep=0.8\npr_override=0.1\npr_empty=0.1", 1000);
        let a = run_sweep(&s, 200, 5).unwrap();
        let b = run_sweep_sequential(&s, 200, 5).unwrap();
        assert_eq!(render_sweep(&a), render_sweep(&b));
    }
}
