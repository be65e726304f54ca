//! Tour construction: the Nearest Neighbor baseline, the basic ant colony
//! and the active-inference colony, which adds per-ant beliefs, free-energy
//! bookkeeping and an elitist reinforcement of the best tour.

mod belief;
mod colony;
mod nn;
mod pheromone;
mod selection;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tsp::{Tour, TspInstance};

pub use belief::{binary_entropy, free_energy, update_belief, BeliefState, TourDiagnostics};
pub use colony::{solve_aco, solve_ai_aco, solve_ai_aco_with, BeliefMode};
pub use nn::nearest_neighbor;
pub use pheromone::{elitist_deposit, evaporate_and_deposit, PheromoneMatrix, PHEROMONE_FLOOR};
pub use selection::{choose_next_node, selection_probabilities, Selection, MIN_DISTANCE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcoParams {
    pub num_ants: usize,
    pub num_iterations: usize,
    /// Pheromone exponent.
    pub alpha: f64,
    /// Heuristic (inverse distance) exponent.
    pub beta: f64,
    /// Fraction of every trail lost per iteration.
    pub evaporation_rate: f64,
    /// Pheromone budget spread over a tour, divided by its length.
    pub pheromone_deposit: f64,
}

impl Default for AcoParams {
    fn default() -> Self {
        Self {
            num_ants: 10,
            num_iterations: 100,
            alpha: 1.0,
            beta: 2.0,
            evaporation_rate: 0.5,
            pheromone_deposit: 1.0,
        }
    }
}

impl AcoParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_ants == 0 {
            return Err(Error::InvalidParams("num_ants must be positive".into()));
        }
        if self.num_iterations == 0 {
            return Err(Error::InvalidParams(
                "num_iterations must be positive".into(),
            ));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "alpha must be finite and >= 0, got {}",
                self.alpha
            )));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "beta must be finite and >= 0, got {}",
                self.beta
            )));
        }
        if !(self.evaporation_rate > 0.0 && self.evaporation_rate < 1.0) {
            return Err(Error::InvalidParams(format!(
                "evaporation rate must be in (0, 1), got {}",
                self.evaporation_rate
            )));
        }
        if !(self.pheromone_deposit > 0.0 && self.pheromone_deposit.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "pheromone deposit must be positive, got {}",
                self.pheromone_deposit
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub best_tour: Tour,
    pub best_length: f64,
    /// Seconds spent inside the solver.
    pub wall_time: f64,
    pub iterations_run: usize,
    /// Global best length after each iteration.
    pub per_iteration_best: Vec<f64>,
    /// One record per constructed tour (active-inference colony only).
    pub diagnostics: Option<Vec<TourDiagnostics>>,
    /// Off-diagonal edges shorter than [`MIN_DISTANCE`] whose heuristic
    /// term was capped.
    pub degenerate_distance_edges: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Nn,
    Aco,
    AiAco,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [SolverKind::Nn, SolverKind::Aco, SolverKind::AiAco];

    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::Nn => "nn",
            SolverKind::Aco => "aco",
            SolverKind::AiAco => "ai_aco",
        }
    }

    /// Stable numeric tag used when deriving per-run seeds.
    pub fn tag(self) -> u64 {
        match self {
            SolverKind::Nn => 1,
            SolverKind::Aco => 2,
            SolverKind::AiAco => 3,
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "nn" => Ok(SolverKind::Nn),
            "aco" => Ok(SolverKind::Aco),
            "ai_aco" | "aiaco" => Ok(SolverKind::AiAco),
            other => Err(Error::InvalidParams(format!(
                "unknown solver '{other}' (expected nn, aco or ai_aco)"
            ))),
        }
    }
}

/// Runs `kind` on `instance`. Nearest Neighbor always starts at node 0 and
/// ignores `params` and `seed`.
pub fn solve(
    kind: SolverKind,
    instance: &TspInstance,
    params: &AcoParams,
    seed: u64,
) -> Result<SolveResult> {
    match kind {
        SolverKind::Nn => nearest_neighbor(instance, 0),
        SolverKind::Aco => solve_aco(instance, params, seed),
        SolverKind::AiAco => solve_ai_aco(instance, params, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = AcoParams::default();
        assert_eq!((p.num_ants, p.num_iterations), (10, 100));
        assert_eq!(
            (p.alpha, p.beta, p.evaporation_rate, p.pheromone_deposit),
            (1.0, 2.0, 0.5, 1.0)
        );
        assert!(p.validate().is_ok());
    }

    #[test]
    fn param_guards() {
        for bad in [
            AcoParams {
                num_ants: 0,
                ..AcoParams::default()
            },
            AcoParams {
                num_iterations: 0,
                ..AcoParams::default()
            },
            AcoParams {
                alpha: -1.0,
                ..AcoParams::default()
            },
            AcoParams {
                beta: f64::NAN,
                ..AcoParams::default()
            },
            AcoParams {
                evaporation_rate: 1.0,
                ..AcoParams::default()
            },
            AcoParams {
                evaporation_rate: 0.0,
                ..AcoParams::default()
            },
            AcoParams {
                pheromone_deposit: 0.0,
                ..AcoParams::default()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn solver_names() {
        for k in SolverKind::ALL {
            assert_eq!(k.as_str().parse::<SolverKind>().unwrap(), k);
        }
        assert!("pso".parse::<SolverKind>().is_err());
    }
}
