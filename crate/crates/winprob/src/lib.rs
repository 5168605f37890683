//! In-game win probability modelling for association football.
//!
//! The pipeline turns raw event streams into per-frame game states (100
//! frames per match), fits win-probability models on them, and evaluates
//! the resulting forecasts:
//!
//! - [`events`]: event-stream data model and JSONL parsing/validation
//! - [`ratings`]: pre-game Elo ratings (file-backed or computed)
//! - [`features`]: per-frame game-state features for both teams
//! - [`baselines`]: logistic-regression, per-frame logistic and random
//!   forest reference models
//! - [`bayes`]: binomial future-goals model with time-varying coefficients,
//!   fit by stochastic variational inference
//! - [`eval`]: ranked probability score, accuracy and calibration curves
//! - [`insights`]: win-probability stories, goal deltas, added goal value,
//!   counterfactual scorelines
//! - [`simgen`]: synthetic match generator with exact outcome-probability
//!   truth logs, used as the test oracle
//! - [`model`]: versioned on-disk model files shared by the CLI

pub mod baselines;
pub mod bayes;
pub mod error;
pub mod eval;
pub mod events;
pub mod features;
pub mod insights;
pub mod model;
pub mod outcome;
pub mod ratings;
pub mod simgen;

pub use error::Error;
pub use outcome::{Outcome, OutcomeProbs};
