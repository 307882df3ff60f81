//! Regularized Evolution with pluggable fitness and variation schedules.
//!
//! The population is an aging queue: every evaluation appends one offspring
//! and removes the oldest individual. Parents are picked by tournament.
//! Alternating schedules use crossover on even steps and mutation on odd
//! steps, counting steps from the first post-initialization evaluation.

mod batch;
mod fitness;
mod stats;

pub use batch::{run_batch, BatchReport, BatchSummary, Checkpoint, RunOutcome};
pub use fitness::{
    fitness_ged_to_target, fitness_noisy_ged, CustomFitness, Direction, Evaluation, FitnessSpec,
};
pub use stats::{collect_parent_stats, median, quantile, FrequencyRow, ParentEvent, ParentStats};

use std::collections::VecDeque;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ged::{GedError, GedSolver};
use crate::graph::{Attr, AttributedGraph, GraphError};
use crate::operators::{
    crossover, mutate, vary_with_retry, CrossoverMode, OperatorConfig, OperatorError,
};

/// Times the second tournament is rerun when it returns a copy of the first
/// parent.
pub const PARENT_RESAMPLES: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolveError {
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("no valid random genotype after {0} attempts")]
    Initialization(usize),
    #[error("fitness evaluation failed: {0}")]
    Fitness(String),
    #[error(transparent)]
    Ged(#[from] GedError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    MutationOnly,
    StdXAlternating,
    SepXAlternating,
    /// A fresh random genotype for every evaluation.
    RandomSearch,
}

impl Schedule {
    pub fn name(self) -> &'static str {
        match self {
            Schedule::MutationOnly => "mutation",
            Schedule::StdXAlternating => "std-x",
            Schedule::SepXAlternating => "sep-x",
            Schedule::RandomSearch => "random",
        }
    }
}

/// Random genotype sampler: order uniform in `[min_order, max_order]`,
/// attributes uniform over the alphabet, each ordered pair an edge with
/// probability `edge_density`, rejected until the validity predicate holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitConfig {
    pub min_order: usize,
    pub max_order: usize,
    pub edge_density: f64,
    pub max_attempts: usize,
}

impl Default for InitConfig {
    fn default() -> Self {
        Self {
            min_order: 2,
            max_order: 7,
            edge_density: 0.3,
            max_attempts: 1_000_000,
        }
    }
}

pub fn random_genotype<R: Rng + ?Sized>(
    init: &InitConfig,
    ops: &OperatorConfig,
    rng: &mut R,
) -> Result<AttributedGraph, EvolveError> {
    for _ in 0..init.max_attempts {
        let n = rng.random_range(init.min_order..=init.max_order);
        let attrs: Vec<Attr> = (0..n)
            .map(|_| ops.alphabet[rng.random_range(0..ops.alphabet.len())])
            .collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.random_bool(init.edge_density) {
                    edges.push((i, j));
                }
            }
        }
        let g = AttributedGraph::new(attrs, edges)?;
        if ops.validity.accepts(&g) {
            return Ok(g);
        }
    }
    Err(EvolveError::Initialization(init.max_attempts))
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub population_size: usize,
    pub tournament_size: usize,
    pub max_evaluations: usize,
    pub schedule: Schedule,
    pub fitness: FitnessSpec,
    pub seed: u64,
    pub operators: OperatorConfig,
    pub init: InitConfig,
}

impl RunConfig {
    /// Population 100, tournament 10, 10 000 evaluations.
    pub fn new(schedule: Schedule, fitness: FitnessSpec, seed: u64) -> Self {
        Self {
            population_size: 100,
            tournament_size: 10,
            max_evaluations: 10_000,
            schedule,
            fitness,
            seed,
            operators: OperatorConfig::default(),
            init: InitConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), EvolveError> {
        let bad = |msg: String| Err(EvolveError::Config(msg));
        if self.population_size == 0 {
            return bad("population size must be at least 1".into());
        }
        if self.tournament_size == 0 || self.tournament_size > self.population_size {
            return bad(format!(
                "tournament size {} not in [1, {}]",
                self.tournament_size, self.population_size
            ));
        }
        if self.max_evaluations < self.population_size {
            return bad(format!(
                "evaluation budget {} is below the population size {}",
                self.max_evaluations, self.population_size
            ));
        }
        let init = &self.init;
        if init.min_order == 0 || init.min_order > init.max_order {
            return bad(format!(
                "initial order range {}..={} is invalid",
                init.min_order, init.max_order
            ));
        }
        if !(0.0..=1.0).contains(&init.edge_density) {
            return bad(format!("edge density {} not in [0, 1]", init.edge_density));
        }
        if let FitnessSpec::NoisyGed { noise_sd, .. } = self.fitness {
            if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
                return bad(format!(
                    "noise sd {noise_sd} must be finite and nonnegative"
                ));
            }
        }
        self.operators.validate()?;
        Ok(())
    }

    fn crossover_config(&self) -> OperatorConfig {
        let mut ops = self.operators.clone();
        ops.crossover_mode = match (self.schedule, ops.crossover_mode) {
            (Schedule::StdXAlternating, _) => CrossoverMode::Standard,
            (_, CrossoverMode::Standard) => CrossoverMode::SepHalf,
            (_, mode) => mode,
        };
        ops
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genotype: AttributedGraph,
    pub fitness: f64,
    pub distance: Option<u32>,
    pub birth_index: usize,
}

/// How an evaluated genotype was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Init,
    Mutation,
    Crossover,
    /// Crossover was skipped (no distinct parents, or every attempt
    /// rejected) and parent 1 was mutated instead.
    MutationFallback,
    Random,
}

impl Origin {
    pub fn name(self) -> &'static str {
        match self {
            Origin::Init => "init",
            Origin::Mutation => "mutation",
            Origin::Crossover => "crossover",
            Origin::MutationFallback => "mutation_fallback",
            Origin::Random => "random",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalRecord {
    /// 1-based evaluation index.
    pub eval: usize,
    pub fitness: f64,
    pub best_fitness: f64,
    pub distance: Option<u32>,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunLog {
    pub seed: u64,
    pub schedule: Schedule,
    pub records: Vec<EvalRecord>,
    /// One event per crossover-produced offspring.
    pub parent_events: Vec<ParentEvent>,
    /// Whether an evaluated genotype reached GED 0 to the target.
    pub success: bool,
    /// Evaluation index of the first success.
    pub hitting_time: Option<usize>,
    /// Birth indices of the final population, oldest first.
    pub final_births: Vec<usize>,
}

impl RunLog {
    pub fn best_fitness(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.best_fitness)
    }

    /// Best-so-far fitness after `eval` evaluations (clamped to the log).
    pub fn best_at(&self, eval: usize) -> f64 {
        let idx = eval.clamp(1, self.records.len().max(1)) - 1;
        self.records.get(idx).map_or(f64::NAN, |r| r.best_fitness)
    }

    pub fn parent_stats(&self) -> ParentStats {
        collect_parent_stats(&self.parent_events)
    }
}

struct Run<'a> {
    cfg: &'a RunConfig,
    cross_ops: OperatorConfig,
    solver: GedSolver,
    rng: ChaCha8Rng,
    population: VecDeque<Individual>,
    log: RunLog,
}

pub fn regularized_evolution(cfg: &RunConfig) -> Result<RunLog, EvolveError> {
    cfg.validate()?;
    let mut run = Run {
        cfg,
        cross_ops: cfg.crossover_config(),
        solver: cfg.operators.ged,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        population: VecDeque::with_capacity(cfg.population_size + 1),
        log: RunLog {
            seed: cfg.seed,
            schedule: cfg.schedule,
            records: Vec::with_capacity(cfg.max_evaluations),
            parent_events: Vec::new(),
            success: false,
            hitting_time: None,
            final_births: Vec::new(),
        },
    };
    for _ in 0..cfg.population_size {
        let g = random_genotype(&cfg.init, &cfg.operators, &mut run.rng)?;
        let ind = run.evaluate(g, Origin::Init)?;
        run.population.push_back(ind);
    }
    let mut step = 0;
    while run.log.records.len() < cfg.max_evaluations {
        let (child, origin) = run.offspring(step)?;
        let ind = run.evaluate(child, origin)?;
        run.population.push_back(ind);
        run.population.pop_front();
        step += 1;
    }
    run.log.final_births = run.population.iter().map(|i| i.birth_index).collect();
    Ok(run.log)
}

impl Run<'_> {
    fn evaluate(
        &mut self,
        genotype: AttributedGraph,
        origin: Origin,
    ) -> Result<Individual, EvolveError> {
        let e = self
            .cfg
            .fitness
            .evaluate(&genotype, &self.solver, &mut self.rng)?;
        let birth_index = self.log.records.len();
        let eval = birth_index + 1;
        let best_fitness = match self.log.records.last() {
            Some(prev)
                if !self
                    .cfg
                    .fitness
                    .direction()
                    .better(e.fitness, prev.best_fitness) =>
            {
                prev.best_fitness
            }
            _ => e.fitness,
        };
        if e.distance == Some(0) && !self.log.success {
            self.log.success = true;
            self.log.hitting_time = Some(eval);
        }
        self.log.records.push(EvalRecord {
            eval,
            fitness: e.fitness,
            best_fitness,
            distance: e.distance,
            origin,
        });
        Ok(Individual {
            genotype,
            fitness: e.fitness,
            distance: e.distance,
            birth_index,
        })
    }

    /// Index of the best of `tournament_size` distinct, uniformly sampled
    /// individuals.
    fn tournament(&mut self) -> usize {
        let dir = self.cfg.fitness.direction();
        let picks = index::sample(
            &mut self.rng,
            self.population.len(),
            self.cfg.tournament_size,
        );
        let mut best = picks.index(0);
        for i in picks.iter().skip(1) {
            if dir.better(self.population[i].fitness, self.population[best].fitness) {
                best = i;
            }
        }
        best
    }

    fn offspring(&mut self, step: usize) -> Result<(AttributedGraph, Origin), EvolveError> {
        match self.cfg.schedule {
            Schedule::RandomSearch => Ok((
                random_genotype(&self.cfg.init, &self.cfg.operators, &mut self.rng)?,
                Origin::Random,
            )),
            Schedule::MutationOnly => {
                let p = self.tournament();
                Ok((self.mutation(p)?, Origin::Mutation))
            }
            Schedule::StdXAlternating | Schedule::SepXAlternating => {
                if step % 2 == 1 {
                    let p = self.tournament();
                    return Ok((self.mutation(p)?, Origin::Mutation));
                }
                let p1 = self.tournament();
                match self.crossover(p1)? {
                    Some(child) => Ok((child, Origin::Crossover)),
                    None => Ok((self.mutation(p1)?, Origin::MutationFallback)),
                }
            }
        }
    }

    /// Mutates the parent until a valid, distinct offspring appears; after
    /// the retry limit the parent itself is returned.
    fn mutation(&mut self, p: usize) -> Result<AttributedGraph, EvolveError> {
        let parent = self.population[p].genotype.clone();
        let ops = &self.cfg.operators;
        let outcome = vary_with_retry(
            &[&parent],
            |r| mutate(&parent, ops, r),
            &ops.validity,
            ops.max_retries,
            &self.solver,
            &mut self.rng,
        )?;
        Ok(outcome.offspring.unwrap_or(parent))
    }

    fn crossover(&mut self, p1: usize) -> Result<Option<AttributedGraph>, EvolveError> {
        let mut p2 = None;
        for _ in 0..=PARENT_RESAMPLES {
            let candidate = self.tournament();
            if candidate != p1
                && !self.solver.is_zero(
                    &self.population[p1].genotype,
                    &self.population[candidate].genotype,
                )?
            {
                p2 = Some(candidate);
                break;
            }
        }
        let Some(p2) = p2 else {
            return Ok(None);
        };
        let g1 = self.population[p1].genotype.clone();
        let g2 = self.population[p2].genotype.clone();
        let ops = &self.cross_ops;
        let outcome = vary_with_retry(
            &[&g1, &g2],
            |r| crossover(&g1, &g2, ops, r),
            &ops.validity,
            ops.max_retries,
            &self.solver,
            &mut self.rng,
        )?;
        if outcome.offspring.is_some() {
            if let Some(target) = self.cfg.fitness.target() {
                let d_opt_p1 = self.solver.solve(target, &g1)?.d_e;
                let d_p1_p2 = self.solver.solve(&g1, &g2)?.d_e;
                self.log.parent_events.push(ParentEvent {
                    d_opt_p1,
                    d_p1_p2,
                    n1_p1: g1.edge_count(),
                    n1_p2: g2.edge_count(),
                });
            }
        }
        Ok(outcome.offspring)
    }
}
