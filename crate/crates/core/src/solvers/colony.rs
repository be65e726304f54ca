//! The colony loop shared by basic ACO and the active-inference variant.
//!
//! Random stream discipline, per ant: one `random_range(0..n)` for the
//! start node, then one uniform `f64` per construction step (including the
//! final, forced step). Both variants consume the stream identically, so
//! their traces can be compared draw for draw.

use std::time::Instant;

use rand::Rng;

use super::belief::{free_energy, update_belief, BeliefState, TourDiagnostics};
use super::pheromone::PheromoneMatrix;
use super::selection::{heuristic, pow, sample_index, sample_prefix, softmax};
use super::{AcoParams, SolveResult};
use crate::error::Result;
use crate::seed::{stream, Stream};
use crate::tsp::{Tour, TspInstance};

/// The scalar belief each ant feeds into its selection weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeliefMode {
    /// Constant 1, no belief bookkeeping (basic ACO).
    Off,
    /// Start at 0.5 and update after every edge once a best tour exists.
    Dynamic,
    /// Track beliefs for the diagnostics but always select with this value.
    Pinned(f64),
}

#[derive(Debug, Clone, Copy)]
struct Variant {
    belief: BeliefMode,
    elitist: bool,
}

/// Basic ant colony: evaporation plus per-ant deposits, no belief, no
/// elitist reinforcement.
pub fn solve_aco(instance: &TspInstance, params: &AcoParams, seed: u64) -> Result<SolveResult> {
    run(
        instance,
        params,
        seed,
        Variant {
            belief: BeliefMode::Off,
            elitist: false,
        },
    )
}

/// Active-inference colony: per-ant beliefs updated edge by edge, a
/// free-energy record per tour and an elitist deposit on the global best
/// after every iteration.
pub fn solve_ai_aco(instance: &TspInstance, params: &AcoParams, seed: u64) -> Result<SolveResult> {
    solve_ai_aco_with(instance, params, seed, BeliefMode::Dynamic)
}

pub fn solve_ai_aco_with(
    instance: &TspInstance,
    params: &AcoParams,
    seed: u64,
    belief: BeliefMode,
) -> Result<SolveResult> {
    run(
        instance,
        params,
        seed,
        Variant {
            belief,
            elitist: true,
        },
    )
}

/// Everything derived from the instance once per run.
struct Landscape<'a> {
    instance: &'a TspInstance,
    n: usize,
    /// `(1/d)^beta`, capped for degenerate distances.
    heuristic_pow: Vec<f64>,
    degenerate_edges: usize,
}

impl<'a> Landscape<'a> {
    fn new(instance: &'a TspInstance, beta: f64) -> Self {
        let n = instance.n();
        let mut degenerate_edges = 0;
        let heuristic_pow = instance
            .weights()
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                if k / n == k % n {
                    return 0.0;
                }
                let (eta, deg) = heuristic(d);
                degenerate_edges += usize::from(deg);
                pow(eta, beta)
            })
            .collect();
        Self {
            instance,
            n,
            heuristic_pow,
            degenerate_edges,
        }
    }
}

struct Ant {
    order: Vec<usize>,
    length: f64,
    belief: BeliefState,
}

struct Workspace {
    available: Vec<usize>,
    weights: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
fn construct(
    land: &Landscape<'_>,
    params: &AcoParams,
    pheromone: &PheromoneMatrix,
    attract: &[f64],
    mode: BeliefMode,
    best: Option<f64>,
    rng: &mut Stream,
    ws: &mut Workspace,
) -> Result<Ant> {
    let n = land.n;
    let start = rng.random_range(0..n);
    ws.available.clear();
    ws.available.extend((0..n).filter(|&j| j != start));
    let mut order = Vec::with_capacity(n);
    order.push(start);
    let mut current = start;
    let mut partial = 0.0;
    let mut belief = BeliefState::initial();
    let tracking = mode != BeliefMode::Off;

    while !ws.available.is_empty() {
        let b = match mode {
            BeliefMode::Off => 1.0,
            BeliefMode::Dynamic => belief.value(),
            BeliefMode::Pinned(v) => v,
        };
        let row = &attract[current * n..(current + 1) * n];
        // running prefix sums of the selection weights
        ws.weights.clear();
        let mut total = 0.0;
        for &j in &ws.available {
            total += row[j] * b;
            ws.weights.push(total);
        }
        let u: f64 = rng.random();
        let k = if total > 0.0 && total.is_finite() {
            sample_prefix(&ws.weights, u)
        } else {
            let logs: Vec<f64> = ws
                .available
                .iter()
                .map(|&j| {
                    params.alpha * pheromone.get(current, j).ln()
                        + land.heuristic_pow[current * n + j].ln()
                        + b.ln()
                })
                .collect();
            sample_index(&softmax(&logs), 1.0, u)
        };
        let next = ws.available.swap_remove(k);
        partial += land.instance.weight(current, next);
        order.push(next);
        current = next;
        if tracking && best.is_some() {
            belief = update_belief(partial, best)?;
        }
    }
    let length = partial + land.instance.weight(current, start);
    Ok(Ant {
        order,
        length,
        belief,
    })
}

fn fill_attractiveness(
    attract: &mut [f64],
    pheromone: &PheromoneMatrix,
    land: &Landscape<'_>,
    alpha: f64,
) {
    let tau = pheromone.values();
    if alpha == 1.0 {
        for ((a, &t), &h) in attract.iter_mut().zip(tau).zip(&land.heuristic_pow) {
            *a = t * h;
        }
    } else {
        for ((a, &t), &h) in attract.iter_mut().zip(tau).zip(&land.heuristic_pow) {
            *a = pow(t, alpha) * h;
        }
    }
}

fn run(
    instance: &TspInstance,
    params: &AcoParams,
    seed: u64,
    variant: Variant,
) -> Result<SolveResult> {
    params.validate()?;
    let clock = Instant::now();
    let n = instance.n();
    let land = Landscape::new(instance, params.beta);
    let mut rng = stream(seed);
    let mut pheromone = PheromoneMatrix::new(n);
    let mut attract = vec![0.0; n * n];
    let mut ws = Workspace {
        available: Vec::with_capacity(n),
        weights: Vec::with_capacity(n),
    };

    let record = variant.belief != BeliefMode::Off;
    let mut diagnostics =
        record.then(|| Vec::with_capacity(params.num_ants * params.num_iterations));
    let mut best_order: Vec<usize> = Vec::new();
    let mut best_length = f64::INFINITY;
    let mut trace = Vec::with_capacity(params.num_iterations);
    let mut ants: Vec<Ant> = Vec::with_capacity(params.num_ants);

    for _ in 0..params.num_iterations {
        fill_attractiveness(&mut attract, &pheromone, &land, params.alpha);
        ants.clear();
        for _ in 0..params.num_ants {
            let best = best_length.is_finite().then_some(best_length);
            let ant = construct(
                &land,
                params,
                &pheromone,
                &attract,
                variant.belief,
                best,
                &mut rng,
                &mut ws,
            )?;
            if let Some(diag) = diagnostics.as_mut() {
                let b = ant.belief.value();
                diag.push(TourDiagnostics {
                    length: ant.length,
                    belief_at_completion: b,
                    free_energy: free_energy(b, ant.length),
                });
            }
            if ant.length < best_length {
                best_length = ant.length;
                best_order.clone_from(&ant.order);
            }
            ants.push(ant);
        }

        pheromone.evaporate(params.evaporation_rate);
        for ant in &ants {
            // zero-length tours only arise on all-zero instances; skip them
            if ant.length > 0.0 {
                pheromone.deposit_cycle(&ant.order, params.pheromone_deposit / ant.length);
            }
        }
        if variant.elitist && best_length > 0.0 {
            pheromone.deposit_cycle(&best_order, 2.0 * params.pheromone_deposit / best_length);
        }
        trace.push(best_length);
    }

    Ok(SolveResult {
        best_tour: Tour::new(best_order, n),
        best_length,
        wall_time: clock.elapsed().as_secs_f64(),
        iterations_run: params.num_iterations,
        per_iteration_best: trace,
        diagnostics,
        degenerate_distance_edges: land.degenerate_edges,
    })
}
