use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sepx_core::evolve::{
    fitness_ged_to_target, fitness_noisy_ged, regularized_evolution, run_batch, Origin, RunConfig,
    Schedule,
};
use sepx_core::ged::GedSolver;
use sepx_core::{AttributedGraph, DagIoRules, Validity};

fn target() -> AttributedGraph {
    AttributedGraph::new(
        vec![1, 3, 4, 5, 2],
        [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)],
    )
    .unwrap()
}

fn config(schedule: Schedule, seed: u64) -> RunConfig {
    let mut cfg = RunConfig::new(schedule, fitness_ged_to_target(target()), seed);
    cfg.population_size = 30;
    cfg.tournament_size = 5;
    cfg.max_evaluations = 300;
    cfg.operators.alphabet = vec![1, 2, 3, 4, 5];
    cfg.operators.validity = Validity::DagIo(DagIoRules::default());
    cfg
}

#[test]
fn aging_keeps_the_newest_individuals() {
    for schedule in [Schedule::MutationOnly, Schedule::SepXAlternating] {
        let log = regularized_evolution(&config(schedule, 4)).unwrap();
        assert_eq!(log.final_births, (270..300).collect::<Vec<_>>());
        assert_eq!(log.records.len(), 300);
        for (i, r) in log.records.iter().enumerate() {
            assert_eq!(r.eval, i + 1);
            if i < 30 {
                assert_eq!(r.origin, Origin::Init);
            }
        }
    }
}

#[test]
fn best_so_far_is_the_running_minimum() {
    let log = regularized_evolution(&config(Schedule::StdXAlternating, 5)).unwrap();
    let mut best = f64::INFINITY;
    for r in &log.records {
        best = best.min(r.fitness);
        assert_eq!(r.best_fitness, best);
        assert_eq!(Some(r.fitness as u32), r.distance);
    }
}

#[test]
fn noisy_fitness_has_the_requested_spread() {
    let f = fitness_noisy_ged(target(), 0.5).unwrap();
    let g = AttributedGraph::new(vec![1, 2], [(0, 1)]).unwrap();
    let solver = GedSolver::default();
    let base = f64::from(solver.distance(&g, &target()).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let draws: Vec<f64> = (0..10_000)
        .map(|_| f.evaluate(&g, &solver, &mut rng).unwrap().fitness)
        .collect();
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let sd =
        (draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64).sqrt();
    assert!((mean - base).abs() < 0.03, "mean {mean}");
    assert!((sd - 0.5).abs() < 0.02, "sd {sd}");
}

#[test]
fn zero_noise_run_equals_plain_run() {
    let plain = config(Schedule::SepXAlternating, 12);
    let mut noisy = plain.clone();
    noisy.fitness = fitness_noisy_ged(target(), 0.0).unwrap();
    assert_eq!(
        regularized_evolution(&plain).unwrap(),
        regularized_evolution(&noisy).unwrap()
    );
}

#[test]
fn parent_statistics_are_normalized() {
    let report = run_batch(&config(Schedule::SepXAlternating, 1), 3, 50);
    let crossovers: usize = report
        .logs()
        .map(|l| {
            l.records
                .iter()
                .filter(|r| r.origin == Origin::Crossover)
                .count()
        })
        .sum();
    assert_eq!(report.parent_stats.events() as usize, crossovers);
    let sum: f64 = report
        .parent_stats
        .d_table()
        .iter()
        .map(|r| r.frequency)
        .sum();
    assert!((sum - 1.0).abs() < 1e-9);
    let sum: f64 = report
        .parent_stats
        .n1_table()
        .iter()
        .map(|r| r.frequency)
        .sum();
    assert!((sum - 1.0).abs() < 1e-9);
}

#[test]
fn mutation_only_run_has_no_parent_events() {
    let report = run_batch(&config(Schedule::MutationOnly, 1), 2, 50);
    assert!(report.parent_stats.is_empty());
    assert!(report.parent_stats.d_table().is_empty());
}
