//! Match outcomes and outcome-probability triples, always from the home
//! team's perspective.

use serde::{Deserialize, Serialize};

/// Final result of a match as seen by the home team.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Win,
    Tie,
    Loss,
}

impl Outcome {
    /// Outcome implied by a final goal difference (home minus away).
    pub fn from_score_diff(diff: i32) -> Self {
        match diff.cmp(&0) {
            std::cmp::Ordering::Greater => Outcome::Win,
            std::cmp::Ordering::Equal => Outcome::Tie,
            std::cmp::Ordering::Less => Outcome::Loss,
        }
    }

    /// Stable class index in the canonical (win, tie, loss) order.
    pub fn index(self) -> usize {
        match self {
            Outcome::Win => 0,
            Outcome::Tie => 1,
            Outcome::Loss => 2,
        }
    }

    pub fn from_index(i: usize) -> Self {
        match i {
            0 => Outcome::Win,
            1 => Outcome::Tie,
            _ => Outcome::Loss,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Win => "win",
            Outcome::Tie => "tie",
            Outcome::Loss => "loss",
        }
    }
}

impl std::str::FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "win" => Ok(Outcome::Win),
            "tie" => Ok(Outcome::Tie),
            "loss" => Ok(Outcome::Loss),
            other => Err(format!("unknown outcome `{other}`")),
        }
    }
}

/// Win/tie/loss probabilities for the home team.
///
/// Components are non-negative and sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbs {
    pub win: f64,
    pub tie: f64,
    pub loss: f64,
}

impl OutcomeProbs {
    pub fn new(win: f64, tie: f64, loss: f64) -> Self {
        let p = Self { win, tie, loss };
        debug_assert!(p.is_valid(1e-6), "invalid outcome probs: {p:?}");
        p
    }

    /// Uniform distribution over the three outcomes.
    pub fn uniform() -> Self {
        Self { win: 1.0 / 3.0, tie: 1.0 / 3.0, loss: 1.0 / 3.0 }
    }

    pub fn get(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::Win => self.win,
            Outcome::Tie => self.tie,
            Outcome::Loss => self.loss,
        }
    }

    /// Components in the canonical (win, tie, loss) order.
    pub fn as_array(&self) -> [f64; 3] {
        [self.win, self.tie, self.loss]
    }

    /// Most likely outcome, ties broken in win > tie > loss order.
    pub fn argmax(&self) -> Outcome {
        let mut best = Outcome::Win;
        let mut best_p = self.win;
        if self.tie > best_p {
            best = Outcome::Tie;
            best_p = self.tie;
        }
        if self.loss > best_p {
            best = Outcome::Loss;
        }
        best
    }

    /// The same distribution seen from the away team.
    pub fn flipped(&self) -> Self {
        Self { win: self.loss, tie: self.tie, loss: self.win }
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        let in_range = |p: f64| (-tol..=1.0 + tol).contains(&p);
        in_range(self.win)
            && in_range(self.tie)
            && in_range(self.loss)
            && ((self.win + self.tie + self.loss) - 1.0).abs() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_breaks_ties_in_class_order() {
        let p = OutcomeProbs::uniform();
        assert_eq!(p.argmax(), Outcome::Win);
        let p = OutcomeProbs::new(0.2, 0.4, 0.4);
        assert_eq!(p.argmax(), Outcome::Tie);
    }

    #[test]
    fn flipped_swaps_win_and_loss() {
        let p = OutcomeProbs::new(0.5, 0.3, 0.2);
        let q = p.flipped();
        assert_eq!(q.win, 0.2);
        assert_eq!(q.tie, 0.3);
        assert_eq!(q.loss, 0.5);
    }

    #[test]
    fn outcome_from_score_diff() {
        assert_eq!(Outcome::from_score_diff(2), Outcome::Win);
        assert_eq!(Outcome::from_score_diff(0), Outcome::Tie);
        assert_eq!(Outcome::from_score_diff(-1), Outcome::Loss);
    }
}
