use rand::Rng;

use super::{AcoParams, PheromoneMatrix};
use crate::error::{Error, Result};
use crate::tsp::TspInstance;

/// Distances below this are treated as this value in the heuristic term.
pub const MIN_DISTANCE: f64 = 1e-12;

#[inline]
pub(crate) fn heuristic(d: f64) -> (f64, bool) {
    if d < MIN_DISTANCE {
        (1.0 / MIN_DISTANCE, true)
    } else {
        (1.0 / d, false)
    }
}

#[inline]
pub(crate) fn pow(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == 0.0 {
        1.0
    } else if e == 2.0 {
        x * x
    } else {
        x.powf(e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Probability per entry of `available`, in the same order.
    pub probabilities: Vec<f64>,
    /// Some candidate edge was shorter than [`MIN_DISTANCE`].
    pub degenerate_distance: bool,
}

/// Transition probabilities from `current` to each node in `available`:
/// `tau^alpha * (1/d)^beta * belief`, normalized.
///
/// The belief factor is common to every candidate and cancels in the
/// normalization; it is kept so that the weights match the formula term
/// for term.
pub fn selection_probabilities(
    pheromone: &PheromoneMatrix,
    instance: &TspInstance,
    current: usize,
    available: &[usize],
    params: &AcoParams,
    belief: f64,
) -> Result<Selection> {
    if available.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let n = instance.n();
    if current >= n {
        return Err(Error::NodeOutOfRange { node: current, n });
    }
    if let Some(&node) = available.iter().find(|&&j| j >= n || j == current) {
        return Err(Error::InvalidParams(format!(
            "node {node} cannot be a candidate from {current}"
        )));
    }
    if !(belief > 0.0 && belief.is_finite()) {
        return Err(Error::BeliefOutOfRange(belief));
    }

    let mut degenerate = false;
    let mut weights = Vec::with_capacity(available.len());
    for &j in available {
        let (eta, deg) = heuristic(instance.weight(current, j));
        degenerate |= deg;
        weights.push(pow(pheromone.get(current, j), params.alpha) * pow(eta, params.beta) * belief);
    }
    let total: f64 = weights.iter().sum();
    if total > 0.0 && total.is_finite() {
        for w in &mut weights {
            *w /= total;
        }
    } else {
        // under- or overflow: redo the weights in log space
        let logs: Vec<f64> = available
            .iter()
            .map(|&j| {
                let (eta, _) = heuristic(instance.weight(current, j));
                params.alpha * pheromone.get(current, j).ln() + params.beta * eta.ln() + belief.ln()
            })
            .collect();
        weights = softmax(&logs);
    }
    Ok(Selection {
        probabilities: weights,
        degenerate_distance: degenerate,
    })
}

pub(crate) fn softmax(logs: &[f64]) -> Vec<f64> {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Index `k` of the first cumulative weight exceeding `u * total`.
#[inline]
pub(crate) fn sample_index(weights: &[f64], total: f64, u: f64) -> usize {
    let target = u * total;
    let mut acc = 0.0;
    for (k, &w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return k;
        }
    }
    // rounding left target at or above the final sum
    weights
        .iter()
        .rposition(|&w| w > 0.0)
        .unwrap_or(weights.len() - 1)
}

/// Same choice as [`sample_index`], given the running prefix sums of the
/// weights. Counts without branching so the cost does not depend on where
/// the probability mass sits.
#[inline]
pub(crate) fn sample_prefix(prefix: &[f64], u: f64) -> usize {
    let total = prefix[prefix.len() - 1];
    let target = u * total;
    let k = prefix
        .iter()
        .map(|&c| usize::from(c <= target))
        .sum::<usize>();
    if k < prefix.len() {
        k
    } else {
        // rounding left target at or above the final sum: last positive weight
        (0..prefix.len())
            .rev()
            .find(|&i| {
                if i == 0 {
                    prefix[0] > 0.0
                } else {
                    prefix[i] > prefix[i - 1]
                }
            })
            .unwrap_or(prefix.len() - 1)
    }
}

/// Draws one node from the categorical distribution over `available`.
/// Consumes exactly one uniform variate from `rng`.
pub fn choose_next_node<R: Rng + ?Sized>(
    probabilities: &[f64],
    available: &[usize],
    rng: &mut R,
) -> Result<usize> {
    if probabilities.len() != available.len() {
        return Err(Error::ProbabilityMismatch {
            probabilities: probabilities.len(),
            nodes: available.len(),
        });
    }
    if available.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-9 || probabilities.iter().any(|p| *p < 0.0) {
        return Err(Error::NotNormalized(total));
    }
    let u: f64 = rng.random();
    Ok(available[sample_index(probabilities, total, u)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream;

    #[test]
    fn uniform_when_everything_is_equal() {
        let inst = TspInstance::uniform(5, 3.0).unwrap();
        let p = PheromoneMatrix::new(5);
        let s = selection_probabilities(&p, &inst, 0, &[1, 2, 3, 4], &AcoParams::default(), 0.37)
            .unwrap();
        for v in s.probabilities {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn pheromone_ratio() {
        let inst = TspInstance::uniform(3, 2.0).unwrap();
        let mut vals = vec![1.0; 9];
        vals[1] = 2.0; // tau(0 -> 1)
        let p = PheromoneMatrix::from_flat(3, vals).unwrap();
        let s = selection_probabilities(&p, &inst, 0, &[1, 2], &AcoParams::default(), 1.0).unwrap();
        assert!((s.probabilities[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.probabilities[1] - 1.0 / 3.0).abs() < 1e-15);
        let low =
            selection_probabilities(&p, &inst, 0, &[1, 2], &AcoParams::default(), 0.1).unwrap();
        let high =
            selection_probabilities(&p, &inst, 0, &[1, 2], &AcoParams::default(), 0.9).unwrap();
        for (a, b) in low.probabilities.iter().zip(&high.probabilities) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_distance_is_capped_and_flagged() {
        let inst = TspInstance::from_rows(vec![
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let p = PheromoneMatrix::new(3);
        let s = selection_probabilities(&p, &inst, 0, &[1, 2], &AcoParams::default(), 1.0).unwrap();
        assert!(s.degenerate_distance);
        assert!(s.probabilities.iter().all(|v| *v > 0.0));
        assert!((s.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_space_fallback() {
        let inst = TspInstance::uniform(3, 1.0).unwrap();
        let p = PheromoneMatrix::from_flat(3, vec![1e-300; 9]).unwrap();
        let params = AcoParams {
            alpha: 3.0,
            ..AcoParams::default()
        };
        let s = selection_probabilities(&p, &inst, 0, &[1, 2], &params, 1.0).unwrap();
        assert_eq!(s.probabilities, vec![0.5, 0.5]);
    }

    #[test]
    fn selection_errors() {
        let inst = TspInstance::uniform(3, 1.0).unwrap();
        let p = PheromoneMatrix::new(3);
        let params = AcoParams::default();
        assert_eq!(
            selection_probabilities(&p, &inst, 0, &[], &params, 1.0),
            Err(Error::EmptyCandidates)
        );
        assert!(selection_probabilities(&p, &inst, 0, &[0, 1], &params, 1.0).is_err());
        assert!(selection_probabilities(&p, &inst, 0, &[1], &params, 0.0).is_err());
    }

    #[test]
    fn choose_degenerate_cases() {
        let mut rng = stream(3);
        for _ in 0..100 {
            assert_eq!(choose_next_node(&[1.0], &[7], &mut rng).unwrap(), 7);
            assert_eq!(choose_next_node(&[1.0, 0.0], &[4, 9], &mut rng).unwrap(), 4);
        }
        assert!(choose_next_node(&[0.5, 0.5], &[1], &mut rng).is_err());
        assert!(choose_next_node(&[0.5, 0.6], &[1, 2], &mut rng).is_err());
    }

    #[test]
    fn choose_matches_frequencies() {
        let mut rng = stream(2024);
        let draws = 100_000;
        let hits = (0..draws)
            .filter(|_| choose_next_node(&[0.5, 0.5], &[0, 1], &mut rng).unwrap() == 0)
            .count();
        let freq = hits as f64 / draws as f64;
        assert!((freq - 0.5).abs() < 0.01, "frequency {freq}");
    }

    proptest::proptest! {
        #[test]
        fn prefix_sampling_matches_linear_scan(
            weights in proptest::collection::vec(0.0f64..10.0, 1..40),
            u in 0.0f64..1.0,
        ) {
            let mut prefix = Vec::with_capacity(weights.len());
            let mut total = 0.0;
            for w in &weights {
                total += w;
                prefix.push(total);
            }
            proptest::prop_assume!(total > 0.0);
            proptest::prop_assert_eq!(sample_prefix(&prefix, u), sample_index(&weights, total, u));
        }
    }
}
