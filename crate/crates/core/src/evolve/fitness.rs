//! Fitness functions for the search loop.

use std::fmt;
use std::sync::Arc;

use rand::RngCore;
use rand_distr::{Distribution, Normal};

use super::EvolveError;
use crate::ged::GedSolver;
use crate::graph::AttributedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Minimize,
    Maximize,
}

impl Direction {
    /// Whether `a` is strictly better than `b`.
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Direction::Minimize => a < b,
            Direction::Maximize => a > b,
        }
    }
}

pub type CustomFitness =
    Arc<dyn Fn(&AttributedGraph, &mut dyn RngCore) -> Result<f64, String> + Send + Sync>;

#[derive(Clone)]
pub enum FitnessSpec {
    /// Exact GED to the target, minimized.
    Ged { target: AttributedGraph },
    /// GED to the target plus Gaussian noise redrawn per evaluation.
    NoisyGed {
        target: AttributedGraph,
        noise_sd: f64,
    },
    Custom {
        f: CustomFitness,
        direction: Direction,
        /// Enables success tracking and parent statistics.
        target: Option<AttributedGraph>,
    },
}

impl fmt::Debug for FitnessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitnessSpec::Ged { target } => f.debug_struct("Ged").field("target", target).finish(),
            FitnessSpec::NoisyGed { target, noise_sd } => f
                .debug_struct("NoisyGed")
                .field("target", target)
                .field("noise_sd", noise_sd)
                .finish(),
            FitnessSpec::Custom {
                direction, target, ..
            } => f
                .debug_struct("Custom")
                .field("direction", direction)
                .field("target", target)
                .finish_non_exhaustive(),
        }
    }
}

/// Result of one fitness evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    /// Noise-free GED to the target, when a target is known.
    pub distance: Option<u32>,
}

pub fn fitness_ged_to_target(target: AttributedGraph) -> FitnessSpec {
    FitnessSpec::Ged { target }
}

pub fn fitness_noisy_ged(
    target: AttributedGraph,
    noise_sd: f64,
) -> Result<FitnessSpec, EvolveError> {
    if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
        return Err(EvolveError::Config(format!(
            "noise sd {noise_sd} must be finite and nonnegative"
        )));
    }
    Ok(FitnessSpec::NoisyGed { target, noise_sd })
}

impl FitnessSpec {
    pub fn direction(&self) -> Direction {
        match self {
            FitnessSpec::Ged { .. } | FitnessSpec::NoisyGed { .. } => Direction::Minimize,
            FitnessSpec::Custom { direction, .. } => *direction,
        }
    }

    pub fn target(&self) -> Option<&AttributedGraph> {
        match self {
            FitnessSpec::Ged { target } | FitnessSpec::NoisyGed { target, .. } => Some(target),
            FitnessSpec::Custom { target, .. } => target.as_ref(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FitnessSpec::Ged { .. } => "ged",
            FitnessSpec::NoisyGed { .. } => "noisy_ged",
            FitnessSpec::Custom { .. } => "custom",
        }
    }

    /// Evaluates `g`. Noise is drawn from `rng` only when `noise_sd > 0`.
    pub fn evaluate(
        &self,
        g: &AttributedGraph,
        solver: &GedSolver,
        rng: &mut dyn RngCore,
    ) -> Result<Evaluation, EvolveError> {
        let distance = match self.target() {
            Some(t) => Some(solver.distance(g, t)?),
            None => None,
        };
        let fitness = match self {
            FitnessSpec::Ged { .. } => f64::from(distance.unwrap_or_default()),
            FitnessSpec::NoisyGed { noise_sd, .. } => {
                let base = f64::from(distance.unwrap_or_default());
                if *noise_sd > 0.0 {
                    let normal = Normal::new(0.0, *noise_sd)
                        .map_err(|e| EvolveError::Config(e.to_string()))?;
                    base + normal.sample(rng)
                } else {
                    base
                }
            }
            FitnessSpec::Custom { f, .. } => f(g, rng).map_err(EvolveError::Fitness)?,
        };
        Ok(Evaluation { fitness, distance })
    }
}
