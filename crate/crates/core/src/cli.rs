//! The `run`, `sweep` and `classify` commands, separated from argument
//! parsing so they can be driven directly.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::report::{render_report, HaltReason};
use crate::runtime::{run_agent, RunError};
use crate::scenario::{Scenario, ScenarioError};
use crate::sweep::{render_sweep, run_sweep};
use crate::taxonomy::{self, AppliesTo, ModelDescriptor};
use crate::trace::emit_trace;

pub const REPORT_FILE: &str = "report.txt";
pub const TRACE_FILE: &str = "trace.tsv";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("sweep needs at least one run")]
    NoRuns,
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunArtifacts {
    pub report_path: PathBuf,
    pub trace_path: PathBuf,
    pub halt_reason: HaltReason,
    pub steps: u64,
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf, CliError> {
    fs::write(&path, contents).map_err(|source| CliError::Write { path: path.clone(), source })?;
    Ok(path)
}

/// Runs the scenario and writes `report.txt` and `trace.tsv` into `out`
/// (default: the scenario's `output_dir`).
pub fn cmd_run(scenario_path: &Path, out: Option<&Path>) -> Result<RunArtifacts, CliError> {
    let scenario = Scenario::load(scenario_path)?;
    let run = run_agent(&scenario)?;
    let dir = out.unwrap_or(&scenario.output_dir);
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })?;
    Ok(RunArtifacts {
        report_path: write(dir.join(REPORT_FILE), &render_report(&run.report))?,
        trace_path: write(dir.join(TRACE_FILE), &emit_trace(&run.trace))?,
        halt_reason: run.report.halt_reason,
        steps: run.report.steps,
    })
}

/// Frequency table over `runs` seeds starting at `base_seed` (default: the
/// scenario's seed).
pub fn cmd_sweep(scenario_path: &Path, runs: u64, base_seed: Option<u64>) -> Result<String, CliError> {
    if runs == 0 {
        return Err(CliError::NoRuns);
    }
    let scenario = Scenario::load(scenario_path)?;
    let summary = run_sweep(&scenario, runs, base_seed.unwrap_or(scenario.seed))?;
    Ok(render_sweep(&summary))
}

/// The scenario agent seen as an autonomy model: each attribute is
/// autonomous on its own, with one level and no second agent.
pub fn agent_model() -> ModelDescriptor {
    ModelDescriptor::new("agent", AppliesTo::PerPart, false, 1).expect("levels >= 1")
}

pub fn cmd_classify(scenario_path: &Path) -> Result<String, CliError> {
    let scenario = Scenario::load(scenario_path)?;
    Ok(classify_text(&scenario))
}

pub fn classify_text(scenario: &Scenario) -> String {
    let mut models = taxonomy::reference_models();
    models.push(agent_model());
    format!(
        "{}\n{}",
        taxonomy::render_models(&models),
        taxonomy::render_attributes(&scenario.attributes())
    )
}
