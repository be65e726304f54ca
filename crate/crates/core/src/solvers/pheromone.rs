use serde::{Deserialize, Serialize};

use super::AcoParams;
use crate::error::{Error, Result};
use crate::tsp::{cycle_edges, Tour};

/// Smallest value a trail may decay to. Only reached after on the order of
/// a thousand deposit-free evaporations.
pub const PHEROMONE_FLOOR: f64 = f64::MIN_POSITIVE;

/// Trail intensity on every directed edge `i -> j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PheromoneMatrix {
    n: usize,
    values: Vec<f64>,
}

impl PheromoneMatrix {
    /// Uniform initial trail of 1 on every edge.
    pub fn new(n: usize) -> Self {
        Self {
            n,
            values: vec![1.0; n * n],
        }
    }

    pub fn from_flat(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::InvalidParams(format!(
                "pheromone buffer has {} entries, expected {}",
                values.len(),
                n * n
            )));
        }
        if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParams(
                "pheromone entries must be finite and positive".into(),
            ));
        }
        Ok(Self { n, values })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn evaporate(&mut self, rho: f64) {
        let keep = 1.0 - rho;
        for v in &mut self.values {
            *v = (*v * keep).max(PHEROMONE_FLOOR);
        }
    }

    /// Adds `amount` to each directed cycle edge of `order`.
    pub(crate) fn deposit_cycle(&mut self, order: &[usize], amount: f64) {
        for (i, j) in cycle_edges(order) {
            self.values[i * self.n + j] += amount;
        }
    }
}

fn check_tour(pheromone: &PheromoneMatrix, tour: &Tour) -> Result<()> {
    let n = pheromone.n();
    if tour.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: tour.len(),
        });
    }
    if let Some(&node) = tour.order().iter().find(|&&v| v >= n) {
        return Err(Error::NodeOutOfRange { node, n });
    }
    Ok(())
}

/// Evaporates every trail by `(1 - rho)`, then lets each tour deposit
/// `deposit / length` on each of its directed cycle edges.
pub fn evaporate_and_deposit(
    pheromone: &mut PheromoneMatrix,
    tours: &[Tour],
    lengths: &[f64],
    params: &AcoParams,
) -> Result<()> {
    if tours.len() != lengths.len() {
        return Err(Error::LengthMismatch(tours.len(), lengths.len()));
    }
    for (tour, &len) in tours.iter().zip(lengths) {
        check_tour(pheromone, tour)?;
        if !(len > 0.0) {
            return Err(Error::NonPositiveLength(len));
        }
    }
    pheromone.evaporate(params.evaporation_rate);
    for (tour, &len) in tours.iter().zip(lengths) {
        pheromone.deposit_cycle(tour.order(), params.pheromone_deposit / len);
    }
    Ok(())
}

/// Extra reinforcement of the best tour: `2 * deposit / best_length` on
/// each of its directed cycle edges. No evaporation.
pub fn elitist_deposit(
    pheromone: &mut PheromoneMatrix,
    best_tour: &Tour,
    best_length: f64,
    params: &AcoParams,
) -> Result<()> {
    check_tour(pheromone, best_tour)?;
    if !(best_length > 0.0) {
        return Err(Error::NonPositiveLength(best_length));
    }
    pheromone.deposit_cycle(
        best_tour.order(),
        2.0 * params.pheromone_deposit / best_length,
    );
    Ok(())
}
