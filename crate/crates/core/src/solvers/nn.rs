use std::time::Instant;

use super::SolveResult;
use crate::error::{Error, Result};
use crate::tsp::{cycle_length, Tour, TspInstance};

/// Greedy tour from `start`: always step to the closest unvisited node,
/// breaking ties by the lowest index.
pub fn nearest_neighbor(instance: &TspInstance, start: usize) -> Result<SolveResult> {
    let n = instance.n();
    if start >= n {
        return Err(Error::InvalidStart { start, n });
    }
    let clock = Instant::now();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    visited[start] = true;
    order.push(start);
    let mut current = start;
    for _ in 1..n {
        let row = instance.row(current);
        let mut next = usize::MAX;
        let mut best = f64::INFINITY;
        for (j, &w) in row.iter().enumerate() {
            if !visited[j] && (w < best || next == usize::MAX) {
                best = w;
                next = j;
            }
        }
        visited[next] = true;
        order.push(next);
        current = next;
    }
    let length = cycle_length(instance, &order);
    Ok(SolveResult {
        best_tour: Tour::new(order, n),
        best_length: length,
        wall_time: clock.elapsed().as_secs_f64(),
        iterations_run: 1,
        per_iteration_best: vec![length],
        diagnostics: None,
        degenerate_distance_edges: 0,
    })
}
