//! Binomial future-goals model with time-varying coefficients.
//!
//! Each team's number of future goals after frame `t` is modelled as
//! `B(100 - t, theta_t)`, where the per-frame scoring intensity is
//!
//! ```text
//! theta = invlogit(alpha_t . x_t + beta + ha * [home side])
//! ```
//!
//! with the coefficient vectors tied across frames by a Gaussian random
//! walk `alpha_t ~ N(alpha_{t-1}, walk_scale)`. The two goal distributions
//! are mapped to win/tie/loss probabilities by exact summation over the
//! joint goal support. Fitting lives in [`vi`].

pub mod vi;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, Discrete};

use crate::error::{Error, Result};
use crate::features::{
    FrameMatrix, FrameState, Side, Standardization, FEATURE_NAMES, NUM_FRAMES,
};
use crate::outcome::OutcomeProbs;

pub use vi::{fit_vi, FitSchedule};

/// Scales of the Gaussian priors; all are standard deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorConfig {
    /// Random-walk step scale between consecutive frame coefficients.
    pub alpha_walk_scale: f64,
    pub beta_scale: f64,
    pub ha_scale: f64,
    /// Prior scale anchoring the first frame's coefficients.
    pub alpha1_scale: f64,
}

impl Default for PriorConfig {
    fn default() -> Self {
        Self { alpha_walk_scale: 2.0, beta_scale: 10.0, ha_scale: 10.0, alpha1_scale: 10.0 }
    }
}

impl PriorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha_walk_scale", self.alpha_walk_scale),
            ("beta_scale", self.beta_scale),
            ("ha_scale", self.ha_scale),
            ("alpha1_scale", self.alpha1_scale),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Range(format!("{name} must be strictly positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Which features the model is fit on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSet {
    /// All eight game-state features.
    Full,
    /// Everything except the pre-game rating difference, used for the
    /// added-goal-value analysis.
    NoRating,
}

impl FeatureSet {
    pub fn names(self) -> Vec<&'static str> {
        match self {
            FeatureSet::Full => FEATURE_NAMES.to_vec(),
            FeatureSet::NoRating => FEATURE_NAMES
                .iter()
                .copied()
                .filter(|n| *n != "rating_diff")
                .collect(),
        }
    }
}

/// Mean-field Gaussian posterior over all model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorParams {
    pub feature_names: Vec<String>,
    /// Per-frame coefficient means, `[frame][feature]`, 100 rows.
    pub alpha_mean: Vec<Vec<f64>>,
    pub alpha_log_sd: Vec<Vec<f64>>,
    pub beta_mean: f64,
    pub beta_log_sd: f64,
    pub ha_mean: f64,
    pub ha_log_sd: f64,
    pub standardization: Standardization,
    pub prior: PriorConfig,
    pub schedule: FitSchedule,
    /// Per-iteration ELBO estimates, ending with a 16-draw full-batch
    /// estimate.
    pub elbo_trace: Vec<f64>,
}

impl PosteriorParams {
    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Indices of the model's features inside [`FEATURE_NAMES`], erroring
    /// when the schema does not line up.
    pub fn projection(&self) -> Result<Vec<usize>> {
        self.standardization.projection(&FEATURE_NAMES)
    }

    /// Check structural invariants after deserialization.
    pub fn validate(&self) -> Result<()> {
        if self.alpha_mean.len() != NUM_FRAMES || self.alpha_log_sd.len() != NUM_FRAMES {
            return Err(Error::Range(format!(
                "alpha matrices must have {NUM_FRAMES} rows, got {}",
                self.alpha_mean.len()
            )));
        }
        let f = self.num_features();
        for (mat, name) in [(&self.alpha_mean, "alpha_mean"), (&self.alpha_log_sd, "alpha_log_sd")]
        {
            for row in mat.iter() {
                if row.len() != f {
                    return Err(Error::Range(format!("{name} row width != {f}")));
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Numerical(format!("non-finite value in {name}")));
                }
            }
        }
        self.projection()?;
        Ok(())
    }
}

/// How parameter values are drawn when computing intensities.
#[derive(Debug, Clone, Copy)]
pub enum DrawMode {
    /// Use posterior means.
    Mean,
    /// Draw one posterior sample with the given seed.
    Sample(u64),
}

/// How match predictions aggregate over the posterior.
#[derive(Debug, Clone, Copy)]
pub enum PredictMode {
    /// Plug in posterior means.
    Mean,
    /// Average outcome probabilities over posterior samples.
    Posterior { samples: usize, seed: u64 },
}

pub fn invlogit(x: f64) -> f64 {
    let p = if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    };
    p.clamp(1e-12, 1.0 - 1e-12)
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Per-frame scoring intensity for one side.
///
/// The state is standardized internally with the statistics stored in
/// `params`, so callers pass raw frame states.
pub fn scoring_intensity(
    state: &FrameState,
    params: &PosteriorParams,
    side: Side,
    mode: DrawMode,
) -> f64 {
    let proj = params.projection().expect("posterior feature schema is valid");
    match mode {
        DrawMode::Mean => intensity_from(state, params, side, &proj, None),
        DrawMode::Sample(seed) => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            intensity_from(state, params, side, &proj, Some(&mut rng))
        }
    }
}

/// Linear predictor and inverse logit, optionally sampling parameters.
fn intensity_from(
    state: &FrameState,
    params: &PosteriorParams,
    side: Side,
    proj: &[usize],
    mut rng: Option<&mut ChaCha12Rng>,
) -> f64 {
    let raw_all = state.features();
    let t = (state.t as usize).clamp(1, NUM_FRAMES) - 1;
    let mut draw = |mean: f64, log_sd: f64| match rng.as_deref_mut() {
        None => mean,
        Some(r) => {
            let z: f64 = standard_normal(r);
            mean + log_sd.exp() * z
        }
    };

    let mut eta = 0.0;
    for (i, &src) in proj.iter().enumerate() {
        let z = (raw_all[src] - params.standardization.means[i]) / params.standardization.sds[i];
        let coef = draw(params.alpha_mean[t][i], params.alpha_log_sd[t][i]);
        eta += coef * z;
    }
    eta += draw(params.beta_mean, params.beta_log_sd);
    if side == Side::Home {
        eta += draw(params.ha_mean, params.ha_log_sd);
    }
    invlogit(eta)
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    use rand_distr::{Distribution, StandardNormal};
    StandardNormal.sample(rng)
}

/// Probability mass function over a team's future goal count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalDist {
    /// `pmf[g]` is the probability of scoring exactly `g` more goals.
    pub pmf: Vec<f64>,
}

impl GoalDist {
    pub fn point_mass_zero() -> Self {
        Self { pmf: vec![1.0] }
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(g, p)| g as f64 * p).sum()
    }
}

/// Binomial distribution of goals over the remaining frames.
pub fn future_goals(theta: f64, frames_remaining: u32) -> GoalDist {
    debug_assert!((0.0..=1.0).contains(&theta));
    if frames_remaining == 0 {
        return GoalDist::point_mass_zero();
    }
    let n = frames_remaining as u64;
    let binom = Binomial::new(theta, n).expect("theta in (0,1)");
    let pmf = (0..=n).map(|g| binom.pmf(g)).collect();
    GoalDist { pmf }
}

/// Map the current score and both future-goal distributions to win/tie/loss
/// probabilities by exact double summation over the joint support.
pub fn outcome_probs(score_diff: i32, home: &GoalDist, away: &GoalDist) -> OutcomeProbs {
    let mut win = 0.0;
    let mut tie = 0.0;
    let mut loss = 0.0;
    for (gh, &ph) in home.pmf.iter().enumerate() {
        for (ga, &pa) in away.pmf.iter().enumerate() {
            let final_diff = score_diff + gh as i32 - ga as i32;
            let p = ph * pa;
            match final_diff.cmp(&0) {
                std::cmp::Ordering::Greater => win += p,
                std::cmp::Ordering::Equal => tie += p,
                std::cmp::Ordering::Less => loss += p,
            }
        }
    }
    OutcomeProbs { win, tie, loss }
}

/// Outcome probabilities at a single frame from both sides' states.
pub fn frame_outcome_probs(
    home_state: &FrameState,
    away_state: &FrameState,
    params: &PosteriorParams,
    mode: DrawMode,
) -> OutcomeProbs {
    let t = home_state.t;
    let remaining = NUM_FRAMES as u32 - t as u32;
    let theta_h = scoring_intensity(home_state, params, Side::Home, mode);
    let theta_a = scoring_intensity(away_state, params, Side::Away, mode);
    let home_dist = future_goals(theta_h, remaining);
    let away_dist = future_goals(theta_a, remaining);
    outcome_probs(home_state.score_diff, &home_dist, &away_dist)
}

/// Win/tie/loss probabilities for all 100 frames of one match.
pub fn predict_match(
    frames: &FrameMatrix,
    params: &PosteriorParams,
    mode: PredictMode,
) -> Result<Vec<OutcomeProbs>> {
    params.projection()?;
    let mut out = Vec::with_capacity(NUM_FRAMES);
    match mode {
        PredictMode::Mean => {
            for t in 1..=NUM_FRAMES as u8 {
                out.push(frame_outcome_probs(
                    frames.state(Side::Home, t),
                    frames.state(Side::Away, t),
                    params,
                    DrawMode::Mean,
                ));
            }
        }
        PredictMode::Posterior { samples, seed } => {
            let samples = samples.max(1);
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            for t in 1..=NUM_FRAMES as u8 {
                let mut acc = [0.0f64; 3];
                for _ in 0..samples {
                    let draw_seed = rng.gen::<u64>();
                    let p = frame_outcome_probs(
                        frames.state(Side::Home, t),
                        frames.state(Side::Away, t),
                        params,
                        DrawMode::Sample(draw_seed),
                    );
                    acc[0] += p.win;
                    acc[1] += p.tie;
                    acc[2] += p.loss;
                }
                let n = samples as f64;
                out.push(OutcomeProbs { win: acc[0] / n, tie: acc[1] / n, loss: acc[2] / n });
            }
        }
    }
    Ok(out)
}

/// One feature's coefficient trajectory in original feature units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureTrace {
    pub name: String,
    /// `(frame, posterior mean, posterior sd)` triples, one per frame.
    pub points: Vec<(u8, f64, f64)>,
}

/// Extract per-frame coefficient traces, rescaled out of standardized
/// units so they are interpretable in the features' own units.
pub fn feature_traces(params: &PosteriorParams) -> Vec<FeatureTrace> {
    (0..params.num_features())
        .map(|f| {
            let sd_f = params.standardization.sds[f];
            let points = (0..NUM_FRAMES)
                .map(|t| {
                    let mean = params.alpha_mean[t][f] / sd_f;
                    let sd = params.alpha_log_sd[t][f].exp() / sd_f;
                    ((t + 1) as u8, mean, sd)
                })
                .collect();
            FeatureTrace { name: params.feature_names[f].clone(), points }
        })
        .collect()
}

#[cfg(test)]
pub(crate) fn test_params(
    feature_set: FeatureSet,
    alpha: Vec<Vec<f64>>,
    beta: f64,
    ha: f64,
    standardization: Standardization,
) -> PosteriorParams {
    let f = feature_set.names().len();
    PosteriorParams {
        feature_names: feature_set.names().iter().map(|s| s.to_string()).collect(),
        alpha_log_sd: vec![vec![-20.0; f]; NUM_FRAMES],
        alpha_mean: alpha,
        beta_mean: beta,
        beta_log_sd: -20.0,
        ha_mean: ha,
        ha_log_sd: -20.0,
        standardization,
        prior: PriorConfig::default(),
        schedule: FitSchedule::default(),
        elbo_trace: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::NUM_FEATURES;
    use approx::assert_abs_diff_eq;

    /// Identity standardization over the full feature set.
    fn identity_standardization() -> Standardization {
        Standardization {
            names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            means: vec![0.0; NUM_FEATURES],
            sds: vec![1.0; NUM_FEATURES],
        }
    }

    fn zero_state(t: u8) -> FrameState {
        FrameState {
            t,
            game_time: 0.0,
            score_diff: 0,
            goals: 0,
            yellows: 0,
            red_diff: 0,
            attacking_passes: 0.0,
            duel_strength: 0.0,
            rating_diff: 0.0,
        }
    }

    fn flat_params(beta: f64, ha: f64) -> PosteriorParams {
        test_params(
            FeatureSet::Full,
            vec![vec![0.0; NUM_FEATURES]; NUM_FRAMES],
            beta,
            ha,
            identity_standardization(),
        )
    }

    #[test]
    fn intensity_closed_forms() {
        let params = flat_params(0.0, 0.0);
        let theta = scoring_intensity(&zero_state(10), &params, Side::Home, DrawMode::Mean);
        assert_abs_diff_eq!(theta, 0.5, epsilon = 1e-12);

        let params = flat_params(-4.0, 0.0);
        let theta = scoring_intensity(&zero_state(10), &params, Side::Away, DrawMode::Mean);
        assert_abs_diff_eq!(theta, 1.0 / (1.0 + 4.0f64.exp()), epsilon = 1e-12);
        assert_abs_diff_eq!(theta, 0.0180, epsilon = 5e-5);
    }

    #[test]
    fn home_advantage_enters_home_side_only() {
        let params = flat_params(-3.0, 0.4);
        let h = scoring_intensity(&zero_state(1), &params, Side::Home, DrawMode::Mean);
        let a = scoring_intensity(&zero_state(1), &params, Side::Away, DrawMode::Mean);
        assert_abs_diff_eq!(h, invlogit(-2.6), epsilon = 1e-12);
        assert_abs_diff_eq!(a, invlogit(-3.0), epsilon = 1e-12);
    }

    #[test]
    fn future_goals_closed_forms() {
        let d = future_goals(0.7, 0);
        assert_eq!(d.pmf, vec![1.0]);

        let d = future_goals(0.5, 2);
        assert_abs_diff_eq!(d.pmf[0], 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(d.pmf[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.pmf[2], 0.25, epsilon = 1e-12);

        // analytic mean n * theta
        let d = future_goals(0.03, 50);
        assert_abs_diff_eq!(d.mean(), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(d.pmf.iter().sum::<f64>(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn outcome_probs_degenerate_and_bernoulli() {
        let point = GoalDist::point_mass_zero();
        let p = outcome_probs(1, &point, &point);
        assert_eq!(p.as_array(), [1.0, 0.0, 0.0]);

        // one frame left, both teams Bernoulli(theta)
        let theta = 0.23;
        let bern = future_goals(theta, 1);
        let p = outcome_probs(0, &bern, &bern);
        assert_abs_diff_eq!(p.win, theta * (1.0 - theta), epsilon = 1e-12);
        assert_abs_diff_eq!(p.loss, theta * (1.0 - theta), epsilon = 1e-12);
        assert_abs_diff_eq!(p.tie, theta * theta + (1.0 - theta) * (1.0 - theta), epsilon = 1e-12);
    }

    /// Independent enumeration oracle: classify every joint goal pair.
    fn enumerate_outcomes(score_diff: i32, home: &GoalDist, away: &GoalDist) -> [f64; 3] {
        let mut acc = [0.0f64; 3];
        for gh in 0..home.pmf.len() {
            for ga in 0..away.pmf.len() {
                let total = score_diff + gh as i32 - ga as i32;
                let idx = if total > 0 {
                    0
                } else if total == 0 {
                    1
                } else {
                    2
                };
                acc[idx] += home.pmf[gh] * away.pmf[ga];
            }
        }
        acc
    }

    #[test]
    fn outcome_probs_matches_enumeration() {
        let home = future_goals(0.4, 3);
        let away = future_goals(0.2, 3);
        let p = outcome_probs(-1, &home, &away);
        let oracle = enumerate_outcomes(-1, &home, &away);
        assert_abs_diff_eq!(p.win, oracle[0], epsilon = 1e-15);
        assert_abs_diff_eq!(p.tie, oracle[1], epsilon = 1e-15);
        assert_abs_diff_eq!(p.loss, oracle[2], epsilon = 1e-15);
    }

    #[test]
    fn score_diff_monotonicity() {
        let home = future_goals(0.03, 60);
        let away = future_goals(0.025, 60);
        let mut last_win = -1.0;
        let mut last_loss = 2.0;
        for diff in -3..=3 {
            let p = outcome_probs(diff, &home, &away);
            assert!(p.win >= last_win);
            assert!(p.loss <= last_loss);
            last_win = p.win;
            last_loss = p.loss;
        }
    }

    #[test]
    fn sample_mode_is_seed_deterministic() {
        let mut params = flat_params(-3.5, 0.2);
        for row in &mut params.alpha_log_sd {
            row.fill(-1.0);
        }
        params.beta_log_sd = -1.0;
        let s = zero_state(30);
        let a = scoring_intensity(&s, &params, Side::Home, DrawMode::Sample(99));
        let b = scoring_intensity(&s, &params, Side::Home, DrawMode::Sample(99));
        let c = scoring_intensity(&s, &params, Side::Home, DrawMode::Sample(100));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn traces_have_one_series_per_feature() {
        let params = flat_params(-3.0, 0.0);
        let traces = feature_traces(&params);
        assert_eq!(traces.len(), NUM_FEATURES);
        for tr in traces {
            assert_eq!(tr.points.len(), NUM_FRAMES);
            assert_eq!(tr.points[0].0, 1);
            assert_eq!(tr.points[99].0, 100);
        }
    }
}
