//! Bookmaker decimal odds: implied probabilities, the favourite baseline
//! and longshot classification.

use serde::{Deserialize, Serialize};

use crate::corpus::Outcome;
use crate::error::{Error, Result};

/// Decimal odds for the three outcomes of one fixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OddsTriple {
    pub home: f64,
    pub draw: f64,
    pub away: f64,
}

impl OddsTriple {
    pub fn new(home: f64, draw: f64, away: f64) -> Result<Self> {
        for (label, v) in [("home", home), ("draw", draw), ("away", away)] {
            if !(v > 1.0) || !v.is_finite() {
                return Err(Error::Data(format!(
                    "decimal odds must be finite and > 1, got {label}={v}"
                )));
            }
        }
        Ok(OddsTriple { home, draw, away })
    }

    fn get(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::HomeWin => self.home,
            Outcome::Draw => self.draw,
            Outcome::AwayWin => self.away,
        }
    }
}

/// Normalized probability triple over {homewin, draw, awaywin}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbs {
    pub home: f64,
    pub draw: f64,
    pub away: f64,
}

impl OutcomeProbs {
    /// Builds a triple from non-negative masses, normalizing to sum 1.
    pub fn from_masses(home: f64, draw: f64, away: f64) -> Result<Self> {
        let sum = home + draw + away;
        if !(sum > 0.0) || home < 0.0 || draw < 0.0 || away < 0.0 {
            return Err(Error::Model(format!(
                "invalid probability masses ({home}, {draw}, {away})"
            )));
        }
        Ok(OutcomeProbs {
            home: home / sum,
            draw: draw / sum,
            away: away / sum,
        })
    }

    pub fn uniform() -> Self {
        OutcomeProbs {
            home: 1.0 / 3.0,
            draw: 1.0 / 3.0,
            away: 1.0 / 3.0,
        }
    }

    pub fn get(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::HomeWin => self.home,
            Outcome::Draw => self.draw,
            Outcome::AwayWin => self.away,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.home, self.draw, self.away]
    }

    /// Outcome with maximum probability; ties resolve homewin < draw < awaywin.
    pub fn argmax(&self) -> Outcome {
        let mut best = Outcome::HomeWin;
        let mut best_p = self.home;
        for o in [Outcome::Draw, Outcome::AwayWin] {
            if self.get(o) > best_p {
                best = o;
                best_p = self.get(o);
            }
        }
        best
    }

    pub fn sum(&self) -> f64 {
        self.home + self.draw + self.away
    }
}

/// Converts decimal odds to probabilities, removing the overround
/// proportionally: p_i = (1/odds_i) / sum_j (1/odds_j).
pub fn implied_probs(odds: &OddsTriple) -> Result<OutcomeProbs> {
    OddsTriple::new(odds.home, odds.draw, odds.away)?;
    OutcomeProbs::from_masses(1.0 / odds.home, 1.0 / odds.draw, 1.0 / odds.away)
}

/// Bookmaker-favourite baseline: the outcome with minimum decimal odds.
/// Ties resolve homewin < draw < awaywin.
pub fn favourite_pick(odds: &OddsTriple) -> Outcome {
    let mut best = Outcome::HomeWin;
    for o in [Outcome::Draw, Outcome::AwayWin] {
        if odds.get(o) < odds.get(best) {
            best = o;
        }
    }
    best
}

/// True iff the actual outcome carried a normalized implied probability
/// strictly below 0.20.
pub fn is_longshot(odds: &OddsTriple, actual: Outcome) -> Result<bool> {
    Ok(implied_probs(odds)?.get(actual) < 0.20)
}
