//! Pre-game team-strength ratings.
//!
//! Ratings are either loaded from a `team,rating` CSV or computed with a
//! standard Elo updater over historical results. Home advantage is left at
//! zero by default because the win-probability model carries its own
//! home-advantage term.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Initial rating for teams without history.
pub const DEFAULT_RATING: f64 = 1500.0;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EloConfig {
    /// Update step per match.
    pub k: f64,
    /// Rating bonus granted to the home side inside the expected-score
    /// formula. Zero by default.
    pub home_offset: f64,
    pub default_rating: f64,
}

impl Default for EloConfig {
    fn default() -> Self {
        Self { k: 20.0, home_offset: 0.0, default_rating: DEFAULT_RATING }
    }
}

/// Mapping from team id to rating, with a default for unseen teams.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatingTable {
    ratings: BTreeMap<String, f64>,
    default_rating: f64,
}

impl Default for RatingTable {
    fn default() -> Self {
        Self::new(DEFAULT_RATING)
    }
}

impl RatingTable {
    pub fn new(default_rating: f64) -> Self {
        Self { ratings: BTreeMap::new(), default_rating }
    }

    pub fn rating(&self, team: &str) -> f64 {
        self.ratings.get(team).copied().unwrap_or(self.default_rating)
    }

    pub fn set(&mut self, team: &str, rating: f64) {
        self.ratings.insert(team.to_string(), rating);
    }

    pub fn teams(&self) -> impl Iterator<Item = (&str, f64)> {
        self.ratings.iter().map(|(t, r)| (t.as_str(), *r))
    }

    /// Rating difference home minus away; unknown teams use the default.
    pub fn rating_diff(&self, home: &str, away: &str) -> f64 {
        self.rating(home) - self.rating(away)
    }

    /// Load a `team,rating` CSV.
    pub fn from_csv(path: &Path) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            team: String,
            rating: f64,
        }
        let mut table = Self::default();
        let mut csv = csv::Reader::from_reader(reader);
        for row in csv.deserialize() {
            let row: Row = row?;
            table.ratings.insert(row.team, row.rating);
        }
        Ok(table)
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        csv.write_record(["team", "rating"])?;
        for (team, rating) in &self.ratings {
            csv.write_record([team.as_str(), &format!("{rating}")])?;
        }
        csv.flush()?;
        Ok(())
    }

    /// Build a table by replaying historical results in order.
    pub fn from_results<'a, I>(results: I, config: EloConfig) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str, u32, u32)>,
    {
        let mut table = Self::new(config.default_rating);
        for (home, away, home_goals, away_goals) in results {
            table.elo_update(home, away, home_goals, away_goals, config);
        }
        table
    }

    /// Standard Elo update from one final score.
    ///
    /// Expected home score is `1 / (1 + 10^(-(r_h + H - r_a)/400))`; both
    /// teams move by `K * (actual - expected)` in opposite directions.
    pub fn elo_update(
        &mut self,
        home: &str,
        away: &str,
        home_goals: u32,
        away_goals: u32,
        config: EloConfig,
    ) {
        let r_home = self.rating(home);
        let r_away = self.rating(away);
        let expected = expected_score(r_home + config.home_offset, r_away);
        let actual = match home_goals.cmp(&away_goals) {
            std::cmp::Ordering::Greater => 1.0,
            std::cmp::Ordering::Equal => 0.5,
            std::cmp::Ordering::Less => 0.0,
        };
        let delta = config.k * (actual - expected);
        self.set(home, r_home + delta);
        self.set(away, r_away - delta);
    }
}

/// Probability-like expected score of the first team.
pub fn expected_score(r_first: f64, r_second: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf(-(r_first - r_second) / 400.0))
}
