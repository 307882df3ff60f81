//! Independent runs in parallel and their aggregate report.

use rayon::prelude::*;
use serde::Serialize;

use super::stats::{quantile, ParentStats};
use super::{regularized_evolution, RunConfig, RunLog, Schedule};
use crate::seed::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutcome {
    pub run_id: usize,
    pub seed: u64,
    #[serde(skip)]
    pub log: Option<RunLog>,
    pub error: Option<String>,
}

/// Best-so-far distribution across successful runs after `eval` evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint {
    pub eval: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchReport {
    pub master_seed: u64,
    pub schedule: Schedule,
    pub runs: Vec<RunOutcome>,
    pub checkpoints: Vec<Checkpoint>,
    pub parent_stats: ParentStats,
}

/// JSON-friendly view of a [`BatchReport`] without the per-run logs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub master_seed: u64,
    pub schedule: Schedule,
    pub runs: usize,
    pub failed_runs: Vec<RunOutcome>,
    pub evaluations: usize,
    pub checkpoints: Vec<Checkpoint>,
    pub final_median: f64,
    pub success_rate: f64,
    pub hitting_times: Vec<Option<usize>>,
    pub median_hitting_time: Option<f64>,
    pub crossover_events: u64,
    pub alternation: &'static str,
    pub parent_selection: &'static str,
}

impl BatchReport {
    pub fn logs(&self) -> impl Iterator<Item = &RunLog> {
        self.runs.iter().filter_map(|r| r.log.as_ref())
    }

    /// Final best-so-far fitness of every successful run, by run id.
    pub fn final_fitness(&self) -> Vec<f64> {
        self.logs().map(RunLog::best_fitness).collect()
    }

    pub fn success_rate(&self) -> f64 {
        let ok: Vec<_> = self.logs().collect();
        if ok.is_empty() {
            return 0.0;
        }
        ok.iter().filter(|l| l.success).count() as f64 / ok.len() as f64
    }

    pub fn summary(&self) -> BatchSummary {
        let hitting_times: Vec<Option<usize>> = self.logs().map(|l| l.hitting_time).collect();
        let mut hits: Vec<f64> = hitting_times.iter().flatten().map(|&t| t as f64).collect();
        hits.sort_by(f64::total_cmp);
        let mut finals = self.final_fitness();
        finals.sort_by(f64::total_cmp);
        BatchSummary {
            master_seed: self.master_seed,
            schedule: self.schedule,
            runs: self.runs.len(),
            failed_runs: self
                .runs
                .iter()
                .filter(|r| r.error.is_some())
                .cloned()
                .collect(),
            evaluations: self.logs().map(|l| l.records.len()).max().unwrap_or(0),
            checkpoints: self.checkpoints.clone(),
            final_median: quantile(&finals, 0.5),
            success_rate: self.success_rate(),
            hitting_times,
            median_hitting_time: (!hits.is_empty()).then(|| quantile(&hits, 0.5)),
            crossover_events: self.parent_stats.events(),
            alternation: "crossover_on_even_steps",
            parent_selection: "two_tournaments_resample_duplicates",
        }
    }
}

/// Runs `n_runs` copies of `cfg`; run `i` uses seed
/// `derive_seed(cfg.seed, [i])`. Failed runs are recorded and skipped in the
/// aggregates. Checkpoints are taken every `checkpoint_every` evaluations and
/// at the end of the budget.
pub fn run_batch(cfg: &RunConfig, n_runs: usize, checkpoint_every: usize) -> BatchReport {
    let runs: Vec<RunOutcome> = (0..n_runs)
        .into_par_iter()
        .map(|run_id| {
            let seed = derive_seed(cfg.seed, &[run_id as u64]);
            let mut run_cfg = cfg.clone();
            run_cfg.seed = seed;
            match regularized_evolution(&run_cfg) {
                Ok(log) => RunOutcome {
                    run_id,
                    seed,
                    log: Some(log),
                    error: None,
                },
                Err(e) => RunOutcome {
                    run_id,
                    seed,
                    log: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let budget = cfg.max_evaluations;
    let step = checkpoint_every.max(1);
    let mut evals: Vec<usize> = (1..=budget / step).map(|k| k * step).collect();
    if evals.last() != Some(&budget) {
        evals.push(budget);
    }
    let logs: Vec<&RunLog> = runs.iter().filter_map(|r| r.log.as_ref()).collect();
    let checkpoints = evals
        .into_iter()
        .map(|eval| {
            let mut v: Vec<f64> = logs.iter().map(|l| l.best_at(eval)).collect();
            v.sort_by(f64::total_cmp);
            Checkpoint {
                eval,
                median: quantile(&v, 0.5),
                q1: quantile(&v, 0.25),
                q3: quantile(&v, 0.75),
            }
        })
        .collect();
    let mut parent_stats = ParentStats::default();
    for l in &logs {
        parent_stats.merge(&l.parent_stats());
    }
    BatchReport {
        master_seed: cfg.seed,
        schedule: cfg.schedule,
        runs,
        checkpoints,
        parent_stats,
    }
}
