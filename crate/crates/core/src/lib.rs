//! Core library: TSP instances and tours, random instance generation,
//! Nearest Neighbor / ACO / active-inference ACO solvers, and the
//! statistical tests used to compare them.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gen;
pub mod seed;
pub mod solvers;
pub mod stats;
pub mod tsp;

pub use error::{Error, Result};
pub use gen::{
    generate_batch, generate_instance, instance_characteristics, Distribution, DistributionChoice,
    GenConfig, InstanceCharacteristics,
};
pub use solvers::{
    nearest_neighbor, solve, solve_aco, solve_ai_aco, AcoParams, BeliefState, PheromoneMatrix,
    SolveResult, SolverKind, TourDiagnostics,
};
pub use tsp::{brute_force_optimum, tour_length, validate_tour, Tour, TspInstance};
