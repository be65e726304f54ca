use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ant's scalar confidence in its partial tour.
///
/// Starts at 0.5 and, once a best tour exists, tracks
/// `1 - partial / best` clamped to `[0.1, 0.9]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct BeliefState(f64);

impl BeliefState {
    pub const INITIAL: f64 = 0.5;
    pub const MIN: f64 = 0.1;
    pub const MAX: f64 = 0.9;

    pub fn initial() -> Self {
        Self(Self::INITIAL)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for BeliefState {
    fn default() -> Self {
        Self::initial()
    }
}

/// Belief after extending a partial tour to `current_partial_length`.
pub fn update_belief(current_partial_length: f64, best_length: Option<f64>) -> Result<BeliefState> {
    match best_length {
        None => Ok(BeliefState::initial()),
        Some(best) if !(best > 0.0) => Err(Error::NonPositiveBest(best)),
        Some(best) => {
            let raw = 1.0 - current_partial_length / best;
            Ok(BeliefState(raw.clamp(BeliefState::MIN, BeliefState::MAX)))
        }
    }
}

/// Binary entropy in nats; zero outside the open interval (0, 1).
pub fn binary_entropy(b: f64) -> f64 {
    if b > 0.0 && b < 1.0 {
        -b * b.ln() - (1.0 - b) * (1.0 - b).ln()
    } else {
        0.0
    }
}

/// Path length plus the entropy of the belief held about it.
pub fn free_energy(belief: f64, path_length: f64) -> f64 {
    path_length + binary_entropy(belief)
}

/// Per-tour record kept by the active-inference colony.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TourDiagnostics {
    pub length: f64,
    pub belief_at_completion: f64,
    pub free_energy: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn belief_rules() {
        assert_eq!(update_belief(3.0, None).unwrap().value(), 0.5);
        assert_eq!(update_belief(10.0, Some(10.0)).unwrap().value(), 0.1);
        assert_eq!(update_belief(5.0, Some(10.0)).unwrap().value(), 0.5);
        assert_eq!(update_belief(0.0, Some(10.0)).unwrap().value(), 0.9);
        assert_eq!(update_belief(25.0, Some(10.0)).unwrap().value(), 0.1);
        assert_eq!(
            update_belief(1.0, Some(0.0)),
            Err(Error::NonPositiveBest(0.0))
        );
    }

    #[test]
    fn free_energy_values() {
        assert!((free_energy(0.5, 10.0) - (10.0 + std::f64::consts::LN_2)).abs() < 1e-12);
        assert_eq!(free_energy(1.0, 7.0), 7.0);
        assert_eq!(free_energy(0.0, 7.0), 7.0);
        // -0.9 ln 0.9 - 0.1 ln 0.1
        assert!((free_energy(0.9, 5.0) - 5.325_082_973_391_448).abs() < 1e-12);
    }
}
