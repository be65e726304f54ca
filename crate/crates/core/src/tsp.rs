//! Symmetric TSP instances, tours and their evaluation.
//!
//! A [`Tour`] is always stored as an open permutation of the node indices;
//! the closing edge back to the first node is implied and added when the
//! tour is evaluated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest instance `brute_force_optimum` will enumerate.
pub const BRUTE_FORCE_MAX_N: usize = 11;

/// Complete symmetric instance with a dense row-major weight matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspInstance {
    n: usize,
    weights: Vec<f64>,
    name: Option<String>,
    /// Weight value that marks masked ("floored") edges of a generated
    /// instance. `None` for instances that did not come from the generator.
    floor: Option<f64>,
}

impl TspInstance {
    /// Builds an instance from a row-major `n * n` buffer.
    ///
    /// Weights must be finite, nonnegative, exactly symmetric and have a
    /// zero diagonal.
    pub fn from_flat(n: usize, weights: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least 2 nodes, got {n}"
            )));
        }
        if weights.len() != n * n {
            return Err(Error::InvalidInstance(format!(
                "expected {} weights for n = {n}, got {}",
                n * n,
                weights.len()
            )));
        }
        for i in 0..n {
            let d = weights[i * n + i];
            if d != 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "diagonal entry ({i},{i}) is {d}, expected 0"
                )));
            }
            for j in (i + 1)..n {
                let w = weights[i * n + j];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidInstance(format!(
                        "weight ({i},{j}) = {w} is not a finite nonnegative number"
                    )));
                }
                if w != weights[j * n + i] {
                    return Err(Error::InvalidInstance(format!(
                        "asymmetric weights: ({i},{j}) = {w}, ({j},{i}) = {}",
                        weights[j * n + i]
                    )));
                }
            }
        }
        Ok(Self {
            n,
            weights,
            name: None,
            floor: None,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidInstance(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        Self::from_flat(n, rows.into_iter().flatten().collect())
    }

    /// Instance whose off-diagonal weights are all `w`.
    pub fn uniform(n: usize, w: f64) -> Result<Self> {
        let weights = (0..n * n)
            .map(|k| if k / n == k % n { 0.0 } else { w })
            .collect();
        Self::from_flat(n, weights)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = Some(floor);
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn floor(&self) -> Option<f64> {
        self.floor
    }

    /// Off-diagonal entries in row-major order (both directions).
    pub fn off_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n;
        self.weights
            .iter()
            .enumerate()
            .filter(move |(k, _)| k / n != k % n)
            .map(|(_, &w)| w)
    }
}

/// A Hamiltonian cycle stored as an open permutation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tour {
    order: Vec<usize>,
    instance_n: usize,
}

impl Tour {
    /// Wraps `order` without checking it; see [`validate_tour`].
    pub fn new(order: Vec<usize>, instance_n: usize) -> Self {
        Self { order, instance_n }
    }

    /// Builds a tour and validates it against `instance`.
    pub fn for_instance(order: Vec<usize>, instance: &TspInstance) -> Result<Self> {
        let tour = Self::new(order, instance.n());
        validate_tour(instance, &tour)?;
        Ok(tour)
    }

    /// Accepts the closed form `[a, b, ..., a]` and drops the repeated start.
    pub fn from_closed(mut seq: Vec<usize>, instance_n: usize) -> Self {
        if seq.len() > 1 && seq.first() == seq.last() {
            seq.pop();
        }
        Self::new(seq, instance_n)
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn instance_n(&self) -> usize {
        self.instance_n
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }

    /// Directed cycle edges, including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        cycle_edges(&self.order)
    }

    pub fn rotated(&self, k: usize) -> Self {
        let mut order = self.order.clone();
        if !order.is_empty() {
            let k = k % order.len();
            order.rotate_left(k);
        }
        Self::new(order, self.instance_n)
    }

    pub fn reversed(&self) -> Self {
        let mut order = self.order.clone();
        order.reverse();
        Self::new(order, self.instance_n)
    }
}

pub(crate) fn cycle_edges(order: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    let n = order.len();
    (0..n).map(move |i| (order[i], order[(i + 1) % n]))
}

/// Cycle cost of an already validated order.
pub(crate) fn cycle_length(instance: &TspInstance, order: &[usize]) -> f64 {
    let mut total = 0.0;
    for w in order.windows(2) {
        total += instance.weight(w[0], w[1]);
    }
    if let (Some(&last), Some(&first)) = (order.last(), order.first()) {
        total += instance.weight(last, first);
    }
    total
}

/// Checks that `tour` is a permutation of `0..n` for this instance.
///
/// The error names the size mismatch, or the first out-of-range,
/// duplicate or missing node.
pub fn validate_tour(instance: &TspInstance, tour: &Tour) -> Result<()> {
    let n = instance.n();
    if tour.instance_n != n || tour.order.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            actual: tour.order.len(),
        });
    }
    let mut seen = vec![false; n];
    for &node in &tour.order {
        if node >= n {
            return Err(Error::NodeOutOfRange { node, n });
        }
        if seen[node] {
            return Err(Error::DuplicateNode(node));
        }
        seen[node] = true;
    }
    match seen.iter().position(|&s| !s) {
        Some(missing) => Err(Error::MissingNode(missing)),
        None => Ok(()),
    }
}

/// Total cost of the cycle, including the return to the first node.
pub fn tour_length(instance: &TspInstance, tour: &Tour) -> Result<f64> {
    validate_tour(instance, tour)?;
    Ok(cycle_length(instance, &tour.order))
}

/// Exact optimum by enumeration for `n <= 11`.
///
/// Node 0 is fixed first and a cycle is only completed when its second node
/// is smaller than its last, so each undirected cycle is scored once.
/// Partial paths already longer than the incumbent are cut.
pub fn brute_force_optimum(instance: &TspInstance) -> Result<(Tour, f64)> {
    let n = instance.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    if n == 2 {
        let order = vec![0, 1];
        let len = cycle_length(instance, &order);
        return Ok((Tour::new(order, n), len));
    }

    struct Search<'a> {
        instance: &'a TspInstance,
        path: Vec<usize>,
        used: Vec<bool>,
        best: f64,
        best_path: Vec<usize>,
    }

    impl Search<'_> {
        fn extend(&mut self, partial: f64) {
            let n = self.instance.n();
            if partial > self.best {
                return;
            }
            let last = *self.path.last().unwrap();
            if self.path.len() == n {
                if self.path[1] > self.path[n - 1] {
                    return;
                }
                let total = partial + self.instance.weight(last, 0);
                if total < self.best {
                    self.best = total;
                    self.best_path.clone_from(&self.path);
                }
                return;
            }
            for next in 1..n {
                if self.used[next] {
                    continue;
                }
                self.used[next] = true;
                self.path.push(next);
                self.extend(partial + self.instance.weight(last, next));
                self.path.pop();
                self.used[next] = false;
            }
        }
    }

    let mut used = vec![false; n];
    used[0] = true;
    let mut search = Search {
        instance,
        path: vec![0],
        used,
        best: f64::INFINITY,
        best_path: Vec::new(),
    };
    search.extend(0.0);
    Ok((Tour::new(search.best_path, n), search.best))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_node() -> TspInstance {
        TspInstance::from_rows(vec![
            vec![0.0, 1.0, 2.0, 3.0],
            vec![1.0, 0.0, 4.0, 5.0],
            vec![2.0, 4.0, 0.0, 6.0],
            vec![3.0, 5.0, 6.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn two_nodes_out_and_back() {
        let inst = TspInstance::uniform(2, 3.5).unwrap();
        let t = Tour::new(vec![0, 1], 2);
        assert_eq!(tour_length(&inst, &t).unwrap(), 7.0);
    }

    #[test]
    fn uniform_four_nodes() {
        let inst = TspInstance::uniform(4, 2.5).unwrap();
        for order in [vec![0, 1, 2, 3], vec![2, 0, 3, 1], vec![3, 2, 1, 0]] {
            assert_eq!(tour_length(&inst, &Tour::new(order, 4)).unwrap(), 10.0);
        }
    }

    #[test]
    fn hand_summed_cycle() {
        let t = Tour::new(vec![0, 1, 2, 3], 4);
        assert_eq!(tour_length(&four_node(), &t).unwrap(), 14.0);
    }

    #[test]
    fn validation_errors() {
        let inst = TspInstance::uniform(3, 1.0).unwrap();
        assert!(validate_tour(&inst, &Tour::new(vec![0, 1, 2], 3)).is_ok());
        assert_eq!(
            validate_tour(&inst, &Tour::new(vec![0, 1, 1], 3)),
            Err(Error::DuplicateNode(1))
        );
        let inst4 = TspInstance::uniform(4, 1.0).unwrap();
        assert_eq!(
            validate_tour(&inst4, &Tour::new(vec![0, 1, 2], 4)),
            Err(Error::SizeMismatch {
                expected: 4,
                actual: 3
            })
        );
        assert_eq!(
            validate_tour(&inst, &Tour::new(vec![0, 1, 5], 3)),
            Err(Error::NodeOutOfRange { node: 5, n: 3 })
        );
        assert!(tour_length(&inst, &Tour::new(vec![0, 0, 1], 3)).is_err());
    }

    #[test]
    fn closed_form_matches_open_form() {
        let inst = four_node();
        let open = Tour::new(vec![2, 0, 3, 1], 4);
        let closed = [2, 0, 3, 1, 2];
        // start appended, then the degenerate self edge weights[2][2] = 0
        let closed_sum: f64 = closed
            .windows(2)
            .map(|w| inst.weight(w[0], w[1]))
            .sum::<f64>()
            + inst.weight(closed[4], closed[0]);
        assert!((tour_length(&inst, &open).unwrap() - closed_sum).abs() < 1e-9);
        let normalized = Tour::from_closed(closed.to_vec(), 4);
        assert_eq!(normalized, open);
    }

    #[test]
    fn brute_force_small_cases() {
        let tri = TspInstance::from_rows(vec![
            vec![0.0, 1.5, 2.0],
            vec![1.5, 0.0, 4.0],
            vec![2.0, 4.0, 0.0],
        ])
        .unwrap();
        let (t, len) = brute_force_optimum(&tri).unwrap();
        assert_eq!(len, 7.5);
        assert!(validate_tour(&tri, &t).is_ok());

        // three distinct cycles on 4 nodes: 0-1-2-3 (14), 0-1-3-2 (1+5+6+2=14), 0-2-1-3 (2+4+5+3=14)
        let (t, len) = brute_force_optimum(&four_node()).unwrap();
        assert_eq!(len, 14.0);
        assert_eq!(tour_length(&four_node(), &t).unwrap(), 14.0);

        let big = TspInstance::uniform(12, 1.0).unwrap();
        assert_eq!(
            brute_force_optimum(&big),
            Err(Error::TooLarge { n: 12, max: 11 })
        );
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(TspInstance::from_rows(vec![vec![0.0]]).is_err());
        assert!(TspInstance::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(TspInstance::from_rows(vec![vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
        assert!(TspInstance::from_rows(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).is_err());
        assert!(TspInstance::from_rows(vec![vec![0.0, f64::NAN], vec![f64::NAN, 0.0]]).is_err());
        assert!(TspInstance::from_rows(vec![vec![0.0, 1.0], vec![1.0]]).is_err());
    }
}
