//! Variation operators: SEP crossover (edit-path and entrywise forms),
//! standard crossover, mutation, and the validity/retry wrapper.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ged::{apply_edits, EditError, EditOp, GedError, GedResult, GedSolver};
use crate::graph::{AaMatrix, Attr, AttributedGraph, GraphError, Permutation, NULL_ATTR};
use crate::validity::Validity;

pub const DEFAULT_MAX_RETRIES: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OperatorError {
    #[error(transparent)]
    Ged(#[from] GedError),
    #[error(transparent)]
    Edit(#[from] EditError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid operator configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossoverMode {
    /// Apply half of a shuffled shortest edit path.
    #[default]
    SepHalf,
    /// Entrywise 0.5 inheritance after optimal alignment.
    SepBernoulli,
    /// Entrywise 0.5 inheritance after a random alignment.
    Standard,
}

#[derive(Debug, Clone)]
pub struct OperatorConfig {
    pub crossover_mode: CrossoverMode,
    /// Per-entry mutation probability. `None` uses `1 / (n (n - 1))` for the
    /// order `n` of the matrix being mutated.
    pub mutation_rate: Option<f64>,
    pub alphabet: Vec<Attr>,
    pub max_retries: usize,
    pub validity: Validity,
    pub ged: GedSolver,
    /// Pick co-optimal alignments uniformly at random instead of
    /// lexicographically.
    pub random_ties: bool,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            crossover_mode: CrossoverMode::default(),
            mutation_rate: None,
            alphabet: vec![1, 2, 3],
            max_retries: DEFAULT_MAX_RETRIES,
            validity: Validity::Unconstrained,
            ged: GedSolver::default(),
            random_ties: false,
        }
    }
}

impl OperatorConfig {
    pub fn validate(&self) -> Result<(), OperatorError> {
        if let Some(p) = self.mutation_rate {
            if !(p > 0.0 && p <= 1.0) {
                return Err(OperatorError::Config(format!(
                    "mutation rate {p} not in (0, 1]"
                )));
            }
        }
        if self.max_retries == 0 {
            return Err(OperatorError::Config(
                "max_retries must be at least 1".into(),
            ));
        }
        if self.alphabet.is_empty() {
            return Err(OperatorError::Config("attribute alphabet is empty".into()));
        }
        if self.alphabet.contains(&NULL_ATTR) {
            return Err(OperatorError::Config(
                "attribute alphabet must not contain 0".into(),
            ));
        }
        Ok(())
    }

    fn align<R: Rng>(
        &self,
        g1: &AttributedGraph,
        g2: &AttributedGraph,
        rng: &mut R,
    ) -> Result<GedResult, GedError> {
        if self.random_ties {
            self.ged.solve_random_ties(g1, g2, rng)
        } else {
            self.ged.solve(g1, g2)
        }
    }
}

pub fn default_mutation_rate(order: usize) -> f64 {
    if order < 2 {
        1.0
    } else {
        1.0 / (order * (order - 1)) as f64
    }
}

/// Offspring of SEP crossover plus the edits that produced it.
#[derive(Debug, Clone)]
pub struct SepOffspring {
    pub offspring: AttributedGraph,
    pub distance: u32,
    pub applied: Vec<EditOp>,
}

/// SEP crossover: the edits of a shortest edit path from `g1` to `g2` are
/// shuffled, then the first `ceil(d/2)` are applied to `g1`.
pub fn sep_crossover<R: Rng>(
    g1: &AttributedGraph,
    g2: &AttributedGraph,
    cfg: &OperatorConfig,
    rng: &mut R,
) -> Result<AttributedGraph, OperatorError> {
    Ok(sep_crossover_traced(g1, g2, cfg, rng)?.offspring)
}

pub fn sep_crossover_traced<R: Rng>(
    g1: &AttributedGraph,
    g2: &AttributedGraph,
    cfg: &OperatorConfig,
    rng: &mut R,
) -> Result<SepOffspring, OperatorError> {
    let ged = cfg.align(g1, g2, rng)?;
    if ged.distance == 0 {
        return Ok(SepOffspring {
            offspring: g1.clone(),
            distance: 0,
            applied: Vec::new(),
        });
    }
    let mut path = shuffle_edit_path(&ged.edits, rng);
    path.truncate(ged.distance.div_ceil(2) as usize);
    let extended = g1.extend_with_nulls(ged.order())?;
    let offspring = apply_edits(&extended, &path)?.strip_nulls();
    Ok(SepOffspring {
        offspring,
        distance: ged.distance,
        applied: path,
    })
}

/// Random order of `edits` that is still a valid sequential edit path.
///
/// Each edit gets a uniformly random rank; edits are then emitted by rank,
/// except that an edge is never added before its new endpoint exists and a
/// vertex is never deleted while it still has an edge. Any prefix of the
/// result therefore changes exactly as many matrix entries as it has edits.
pub fn shuffle_edit_path<R: Rng + ?Sized>(edits: &[EditOp], rng: &mut R) -> Vec<EditOp> {
    let d = edits.len();
    let mut rank: Vec<usize> = (0..d).collect();
    rank.shuffle(rng);

    let mut successors = vec![Vec::new(); d];
    let mut blockers = vec![0usize; d];
    for (i, before) in edits.iter().enumerate() {
        for (j, after) in edits.iter().enumerate() {
            if before.must_precede(after) {
                successors[i].push(j);
                blockers[j] += 1;
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = (0..d)
        .filter(|&i| blockers[i] == 0)
        .map(|i| Reverse((rank[i], i)))
        .collect();
    let mut order = Vec::with_capacity(d);
    while let Some(Reverse((_, i))) = ready.pop() {
        order.push(edits[i]);
        for &j in &successors[i] {
            blockers[j] -= 1;
            if blockers[j] == 0 {
                ready.push(Reverse((rank[j], j)));
            }
        }
    }
    debug_assert_eq!(order.len(), d);
    order
}

/// Each entry is taken from `a` or `b` with probability one half.
pub fn uniform_recombine<R: Rng + ?Sized>(
    a: &AaMatrix,
    b: &AaMatrix,
    rng: &mut R,
) -> Result<AaMatrix, GraphError> {
    if a.order() != b.order() {
        return Err(GraphError::DimensionMismatch {
            left: a.order(),
            right: b.order(),
        });
    }
    let entries = a
        .entries()
        .iter()
        .zip(b.entries())
        .map(|(&x, &y)| if rng.random::<bool>() { y } else { x })
        .collect();
    AaMatrix::from_entries(a.order(), entries)
}

/// Entrywise crossover after aligning `g2` to `g1` by the optimal GED
/// permutation.
pub fn sep_bernoulli_crossover<R: Rng>(
    g1: &AttributedGraph,
    g2: &AttributedGraph,
    cfg: &OperatorConfig,
    rng: &mut R,
) -> Result<AttributedGraph, OperatorError> {
    let ged = cfg.align(g1, g2, rng)?;
    let child = uniform_recombine(&ged.source, &ged.aligned_target, rng)?;
    Ok(AttributedGraph::from_aa_matrix(&child).strip_nulls())
}

/// Entrywise crossover after aligning `g2` to `g1` by a uniformly random
/// permutation.
pub fn standard_crossover<R: Rng>(
    g1: &AttributedGraph,
    g2: &AttributedGraph,
    rng: &mut R,
) -> Result<AttributedGraph, OperatorError> {
    let n = g1.order().max(g2.order());
    let a1 = g1.extend_with_nulls(n)?.to_aa_matrix();
    let a2 = g2
        .extend_with_nulls(n)?
        .to_aa_matrix()
        .permute(&Permutation::random(n, rng))?;
    let child = uniform_recombine(&a1, &a2, rng)?;
    Ok(AttributedGraph::from_aa_matrix(&child).strip_nulls())
}

pub fn crossover<R: Rng>(
    g1: &AttributedGraph,
    g2: &AttributedGraph,
    cfg: &OperatorConfig,
    rng: &mut R,
) -> Result<AttributedGraph, OperatorError> {
    match cfg.crossover_mode {
        CrossoverMode::SepHalf => sep_crossover(g1, g2, cfg, rng),
        CrossoverMode::SepBernoulli => sep_bernoulli_crossover(g1, g2, cfg, rng),
        CrossoverMode::Standard => standard_crossover(g1, g2, rng),
    }
}

/// Resamples each entry with probability `rate`: edge indicators flip, and
/// attributes move uniformly to another value of `alphabet ∪ {0}`.
pub fn mutate_aa_matrix<R: Rng + ?Sized>(
    m: &AaMatrix,
    rate: f64,
    alphabet: &[Attr],
    rng: &mut R,
) -> AaMatrix {
    let n = m.order();
    let mut out = m.clone();
    let mut choices: Vec<Attr> = Vec::with_capacity(alphabet.len() + 1);
    for i in 0..n {
        for j in 0..n {
            if !rng.random_bool(rate) {
                continue;
            }
            let current = m.get(i, j);
            if i != j {
                out.set(i, j, 1 - current.min(1));
                continue;
            }
            choices.clear();
            choices.push(NULL_ATTR);
            choices.extend(alphabet.iter().copied().filter(|&a| a != NULL_ATTR));
            choices.sort_unstable();
            choices.dedup();
            choices.retain(|&a| a != current);
            if let Some(&attr) = choices.as_slice().choose(rng) {
                out.set(i, i, attr);
            }
        }
    }
    out
}

/// Mutation on `g` padded with one null vertex, so a vertex can be added.
pub fn mutate<R: Rng>(
    g: &AttributedGraph,
    cfg: &OperatorConfig,
    rng: &mut R,
) -> Result<AttributedGraph, OperatorError> {
    let extended = g.extend_with_nulls(g.order() + 1)?;
    let rate = cfg
        .mutation_rate
        .unwrap_or_else(|| default_mutation_rate(extended.order()));
    let m = mutate_aa_matrix(&extended.to_aa_matrix(), rate, &cfg.alphabet, rng);
    Ok(AttributedGraph::from_aa_matrix(&m).strip_nulls())
}

#[derive(Debug, Clone)]
pub struct RetryOutcome {
    /// `None` when every attempt was rejected.
    pub offspring: Option<AttributedGraph>,
    pub attempts: usize,
}

/// Calls `op` until it returns a graph that passes `validity` and has a
/// nonzero GED to every parent, giving up after `max_retries` attempts.
pub fn vary_with_retry<R, F>(
    parents: &[&AttributedGraph],
    mut op: F,
    validity: &Validity,
    max_retries: usize,
    solver: &GedSolver,
    rng: &mut R,
) -> Result<RetryOutcome, OperatorError>
where
    R: Rng,
    F: FnMut(&mut R) -> Result<AttributedGraph, OperatorError>,
{
    for attempt in 1..=max_retries {
        let child = op(rng)?;
        if !validity.accepts(&child) {
            continue;
        }
        let mut distinct = true;
        for parent in parents {
            if solver.is_zero(&child, parent)? {
                distinct = false;
                break;
            }
        }
        if distinct {
            return Ok(RetryOutcome {
                offspring: Some(child),
                attempts: attempt,
            });
        }
    }
    Ok(RetryOutcome {
        offspring: None,
        attempts: max_retries,
    })
}
