use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use sepx_core::evolve::{
    fitness_ged_to_target, fitness_noisy_ged, run_batch, BatchReport, BatchSummary, FitnessSpec,
    RunConfig, Schedule,
};
use sepx_core::ged::GedSolver;
use sepx_core::lbei::{lbei_grid, GridConfig, NseMode, RangeSpec, SpaceParams};
use sepx_core::operators::{self, CrossoverMode, OperatorConfig};
use sepx_core::{AttributedGraph, DagIoRules, Validity};

use crate::error::CliError;
use crate::{
    CrossoverArg, FitnessArg, LbeiArgs, NseArg, OperatorArg, SearchArgs, SpaceArg, ValidityArg,
};

fn read_graph(path: &Path) -> Result<AttributedGraph, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(path.display(), e))?;
    AttributedGraph::from_json_str(&text).map_err(|e| CliError::input(path.display(), e))
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string(value).map_err(|e| CliError::Input(e.to_string()))?;
    let mut out = io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| CliError::input("stdout", e))
}

pub fn ged(a: &Path, b: &Path, max_order: usize) -> Result<(), CliError> {
    let (g1, g2) = (read_graph(a)?, read_graph(b)?);
    let result = GedSolver::with_max_order(max_order).solve(&g1, &g2)?;
    print_json(&result)
}

pub fn crossover(
    mode: CrossoverArg,
    a: &Path,
    b: &Path,
    max_order: usize,
    seed: u64,
) -> Result<(), CliError> {
    let (g1, g2) = (read_graph(a)?, read_graph(b)?);
    let cfg = OperatorConfig {
        crossover_mode: match mode {
            CrossoverArg::Sep => CrossoverMode::SepHalf,
            CrossoverArg::SepBernoulli => CrossoverMode::SepBernoulli,
            CrossoverArg::Std => CrossoverMode::Standard,
        },
        ged: GedSolver::with_max_order(max_order),
        ..OperatorConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let child = operators::crossover(&g1, &g2, &cfg, &mut rng)?;
    print_json(&child)
}

pub fn mutate(a: &Path, pm: Option<f64>, alphabet: Vec<u32>, seed: u64) -> Result<(), CliError> {
    let g = read_graph(a)?;
    let cfg = OperatorConfig {
        mutation_rate: pm,
        alphabet,
        ..OperatorConfig::default()
    };
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let child = operators::mutate(&g, &cfg, &mut rng)?;
    print_json(&child)
}

fn space_params(args: &LbeiArgs) -> Result<SpaceParams, CliError> {
    let preset = match args.space {
        SpaceArg::Nas101 => Some(SpaceParams::nas101()),
        SpaceArg::Nasnlp => Some(SpaceParams::nasnlp()),
        SpaceArg::Custom => None,
    };
    let pick = |flag: Option<usize>, base: Option<usize>, name: &str| {
        flag.or(base)
            .ok_or_else(|| CliError::Usage(format!("--space custom requires --{name}")))
    };
    let sp = SpaceParams::new(
        pick(args.n, preset.map(|p| p.n), "n")?,
        pick(args.nopt1, preset.map(|p| p.n_opt_1), "nopt1")?,
        pick(args.n11, preset.map(|p| p.n_1_1), "n11")?,
        pick(args.n21, preset.map(|p| p.n_2_1), "n21")?,
    )?;
    Ok(sp)
}

pub fn simulate_lbei(args: &LbeiArgs) -> Result<(), CliError> {
    let sp = space_params(args)?;
    let mut cfg = GridConfig::new(sp, args.trials);
    cfg.mode = match args.nse_mode {
        NseArg::Consistent => NseMode::Consistent,
        NseArg::AsStated => NseMode::AsStated,
    };
    cfg.mutation_rate = args.pm;
    if let Some(end) = args.d1_max {
        cfg.d1 = RangeSpec::new(0, end);
    }
    if let Some(end) = args.d2_max {
        cfg.d2 = RangeSpec::new(0, end);
    }
    let grid = lbei_grid(&cfg, args.seed.seed)?;

    let sink: Box<dyn Write> = match &args.out {
        Some(path) => {
            Box::new(fs::File::create(path).map_err(|e| CliError::input(path.display(), e))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for cell in &grid.cells {
        w.serialize(cell).map_err(|e| CliError::input("csv", e))?;
    }
    w.flush().map_err(|e| CliError::input("csv", e))
}

#[derive(Serialize)]
struct SearchSummary<'a> {
    operator: &'static str,
    fitness: &'static str,
    noise_sd: f64,
    population: usize,
    tournament: usize,
    evaluations: usize,
    runs: usize,
    validity: &'static str,
    alphabet: &'a [u32],
    report: BatchSummary,
}

#[derive(Serialize)]
struct RunRow<'a> {
    run_id: usize,
    eval: usize,
    best_fitness: f64,
    operator: &'a str,
}

#[derive(Serialize)]
struct DRow {
    d_opt_p1: u32,
    d_p1_p2: u32,
    count: u64,
    frequency: f64,
}

#[derive(Serialize)]
struct N1Row {
    n1_p1: usize,
    n1_p2: usize,
    count: u64,
    frequency: f64,
}

pub fn search(args: &SearchArgs) -> Result<(), CliError> {
    let target = read_graph(&args.target)?;
    let schedule = match args.operator {
        OperatorArg::Mutation => Schedule::MutationOnly,
        OperatorArg::StdX => Schedule::StdXAlternating,
        OperatorArg::SepX => Schedule::SepXAlternating,
        OperatorArg::Random => Schedule::RandomSearch,
    };
    let fitness: FitnessSpec = match args.fitness {
        FitnessArg::Ged => fitness_ged_to_target(target.clone()),
        FitnessArg::NoisyGed => fitness_noisy_ged(target.clone(), args.noise_sd)?,
    };
    let validity = match args.validity {
        ValidityArg::DagIo => Validity::DagIo(DagIoRules {
            max_edges: Some(args.max_edges),
            max_vertices: Some(args.max_vertices),
            ..DagIoRules::default()
        }),
        ValidityArg::None => Validity::Unconstrained,
    };
    let mut cfg = RunConfig::new(schedule, fitness, args.seed.seed);
    cfg.population_size = args.pop;
    cfg.tournament_size = args.tournament;
    cfg.max_evaluations = args.evals;
    cfg.operators.alphabet = args.alphabet.clone();
    cfg.operators.validity = validity;
    cfg.init.max_order = args.max_vertices.max(cfg.init.min_order);
    if args.runs == 0 {
        return Err(CliError::Usage("--runs must be at least 1".into()));
    }
    cfg.validate()?;
    let solver = cfg.operators.ged;
    solver.distance(&target, &target)?;
    if args.max_vertices + 1 > solver.max_order {
        return Err(CliError::Capacity(format!(
            "--max-vertices {} needs extended order {} above the solver maximum {}",
            args.max_vertices,
            args.max_vertices + 1,
            solver.max_order
        )));
    }

    let report = run_batch(&cfg, args.runs, args.checkpoint);
    write_search_outputs(args, &cfg, &report)
}

fn write_search_outputs(
    args: &SearchArgs,
    cfg: &RunConfig,
    report: &BatchReport,
) -> Result<(), CliError> {
    let dir = &args.out;
    fs::create_dir_all(dir).map_err(|e| CliError::input(dir.display(), e))?;

    write_csv(
        dir,
        "runs.csv",
        &["run_id", "eval", "best_fitness", "operator"],
        |w| {
            for outcome in &report.runs {
                let Some(log) = &outcome.log else { continue };
                for r in &log.records {
                    w.serialize(RunRow {
                        run_id: outcome.run_id,
                        eval: r.eval,
                        best_fitness: r.best_fitness,
                        operator: r.origin.name(),
                    })?;
                }
            }
            Ok(())
        },
    )?;
    write_csv(
        dir,
        "stats_d.csv",
        &["d_opt_p1", "d_p1_p2", "count", "frequency"],
        |w| {
            for row in report.parent_stats.d_table() {
                w.serialize(DRow {
                    d_opt_p1: row.x,
                    d_p1_p2: row.y,
                    count: row.count,
                    frequency: row.frequency,
                })?;
            }
            Ok(())
        },
    )?;
    write_csv(
        dir,
        "stats_n1.csv",
        &["n1_p1", "n1_p2", "count", "frequency"],
        |w| {
            for row in report.parent_stats.n1_table() {
                w.serialize(N1Row {
                    n1_p1: row.x,
                    n1_p2: row.y,
                    count: row.count,
                    frequency: row.frequency,
                })?;
            }
            Ok(())
        },
    )?;

    let summary = SearchSummary {
        operator: cfg.schedule.name(),
        fitness: cfg.fitness.name(),
        noise_sd: args.noise_sd,
        population: cfg.population_size,
        tournament: cfg.tournament_size,
        evaluations: cfg.max_evaluations,
        runs: args.runs,
        validity: cfg.operators.validity.name(),
        alphabet: &cfg.operators.alphabet,
        report: report.summary(),
    };
    let text =
        serde_json::to_string_pretty(&summary).map_err(|e| CliError::Input(e.to_string()))?;
    fs::write(dir.join("summary.json"), text + "\n")
        .map_err(|e| CliError::input(dir.join("summary.json").display(), e))
}

/// Writes `header` and then whatever `rows` serializes, so empty tables still
/// carry their header.
fn write_csv<F>(dir: &Path, name: &str, header: &[&str], rows: F) -> Result<(), CliError>
where
    F: FnOnce(&mut csv::Writer<fs::File>) -> Result<(), csv::Error>,
{
    let path = dir.join(name);
    let err = |e: csv::Error| CliError::input(path.display(), e);
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(&path)
        .map_err(err)?;
    w.write_record(header).map_err(err)?;
    rows(&mut w).map_err(err)?;
    w.flush().map_err(|e| CliError::input(path.display(), e))
}
