//! Benchmark harness: repeated solver runs per instance with success-rate
//! and timing aggregation, rendered as a table, CSV, or JSON.
//!
//! The success rate of an instance is the number of satisfied runs divided
//! by the total; the table renderer follows the usual reporting convention
//! of `<rate>% <mean seconds>` for instances with at least one success and
//! `(<k> clauses)` — the best false-clause count — for instances without.

use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cnf::CnfFormula;
use crate::engine::{solve, verify_report, RunReport, RunStatus, SolverConfig};

/// Aggregated outcome for one suite, one entry per instance in input order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub instances: Vec<InstanceReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub name: String,
    #[serde(flatten)]
    pub outcome: InstanceOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceOutcome {
    /// All runs completed; aggregates follow.
    Completed(InstanceStats),
    /// The instance could not be loaded; the suite carried on without it.
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceStats {
    pub runs: Vec<RunReport>,
    /// Satisfied runs divided by total runs, in `[0, 1]`.
    pub success_rate: f64,
    /// Mean wall time over satisfied runs only; absent when none succeeded.
    pub mean_success_wall_time: Option<Duration>,
    /// Minimum false-clause count over all runs; 0 iff some run satisfied.
    pub best_false_clause_count: usize,
}

impl InstanceStats {
    fn from_runs(runs: Vec<RunReport>) -> Self {
        let total = runs.len();
        let successes: Vec<&RunReport> =
            runs.iter().filter(|r| r.status == RunStatus::Satisfied).collect();
        let success_rate = successes.len() as f64 / total as f64;
        let mean_success_wall_time = if successes.is_empty() {
            None
        } else {
            let sum: Duration = successes.iter().map(|r| r.wall_time).sum();
            Some(sum / successes.len() as u32)
        };
        let best_false_clause_count =
            runs.iter().map(|r| r.false_clause_count).min().unwrap_or(0);
        InstanceStats { runs, success_rate, mean_success_wall_time, best_false_clause_count }
    }
}

/// Runs `runs_per_instance` seeded solves per instance and aggregates.
///
/// Run `r` of every instance uses seed `base_seed + r`, and each run's seed
/// is recorded in its report, so any single run is reproducible from the
/// suite report alone. Runs execute in parallel; aggregation is a
/// deterministic fold in `(instance, run index)` order regardless of
/// completion order. Instances that failed to load are recorded and skipped.
pub fn run_suite(
    instances: impl IntoIterator<Item = (String, Result<CnfFormula, String>)>,
    cfg: &SolverConfig,
    runs_per_instance: usize,
    base_seed: u64,
) -> SuiteReport {
    assert!(runs_per_instance >= 1, "suite needs at least one run per instance");
    let instances: Vec<(String, Result<CnfFormula, String>)> = instances.into_iter().collect();
    let reports = instances
        .into_par_iter()
        .map(|(name, source)| {
            let outcome = match source {
                Err(error) => InstanceOutcome::Failed { error },
                Ok(formula) => {
                    let runs: Vec<RunReport> = (0..runs_per_instance)
                        .into_par_iter()
                        .map(|run| {
                            let run_cfg = SolverConfig {
                                random_seed: base_seed + run as u64,
                                ..*cfg
                            };
                            let report =
                                solve(&formula, &run_cfg).expect("suite config validated per run");
                            assert!(
                                verify_report(&formula, &report),
                                "engine produced an unverifiable report"
                            );
                            report
                        })
                        .collect();
                    InstanceOutcome::Completed(InstanceStats::from_runs(runs))
                }
            };
            InstanceReport { name, outcome }
        })
        .collect();
    SuiteReport { instances: reports }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

/// Renders a suite report.
///
/// Table mode prints one `<rate>% <seconds>` or `(<k> clauses)` cell per
/// instance; CSV emits one denormalized row per run; JSON is the full
/// structure including per-run fitness traces.
pub fn render_report(report: &SuiteReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => render_table(report),
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Json => {
            let mut out = serde_json::to_string_pretty(report).expect("report serializes");
            out.push('\n');
            out
        }
    }
}

/// The paper-style result cell for one instance.
fn result_cell(stats: &InstanceStats) -> String {
    match stats.mean_success_wall_time {
        Some(mean) => format!("{:.0}% {:.3}", stats.success_rate * 100.0, mean.as_secs_f64()),
        None => format!("({} clauses)", stats.best_false_clause_count),
    }
}

fn render_table(report: &SuiteReport) -> String {
    let name_width = report
        .instances
        .iter()
        .map(|i| i.name.len())
        .chain(std::iter::once("instance".len()))
        .max()
        .unwrap_or(0);
    let mut out = format!("{:<name_width$}  result\n", "instance");
    for instance in &report.instances {
        let cell = match &instance.outcome {
            InstanceOutcome::Completed(stats) => result_cell(stats),
            InstanceOutcome::Failed { error } => format!("error: {error}"),
        };
        out.push_str(&format!("{:<name_width$}  {cell}\n", instance.name));
    }
    out
}

/// Quotes a CSV field only when it needs it.
fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

fn render_csv(report: &SuiteReport) -> String {
    let mut out = String::from(
        "instance,run,seed,status,best_fitness,false_clauses,iterations,wall_time_s,\
         success_rate,mean_success_time_s,best_false_clauses,error\n",
    );
    for instance in &report.instances {
        let name = csv_field(&instance.name);
        match &instance.outcome {
            InstanceOutcome::Failed { error } => {
                out.push_str(&format!("{name},,,,,,,,,,,{}\n", csv_field(error)));
            }
            InstanceOutcome::Completed(stats) => {
                let mean = stats
                    .mean_success_wall_time
                    .map(|d| format!("{:.3}", d.as_secs_f64()))
                    .unwrap_or_default();
                for (run_index, run) in stats.runs.iter().enumerate() {
                    out.push_str(&format!(
                        "{name},{},{},{},{},{},{},{:.3},{},{},{},\n",
                        run_index,
                        run.seed,
                        match run.status {
                            RunStatus::Satisfied => "SATISFIED",
                            RunStatus::BudgetExhausted => "BUDGET_EXHAUSTED",
                        },
                        run.best_fitness,
                        run.false_clause_count,
                        run.iterations_used,
                        run.wall_time.as_secs_f64(),
                        stats.success_rate,
                        mean,
                        stats.best_false_clause_count,
                    ));
                }
            }
        }
    }
    out
}

/// Trace CSV for a single run: header plus one row per trace entry.
pub fn render_trace_csv(report: &RunReport) -> String {
    let mut out = String::from("iteration,gbest_fitness\n");
    for (iteration, fitness) in &report.fitness_trace {
        out.push_str(&format!("{iteration},{fitness}\n"));
    }
    out
}
