//! Analytics built on the fitted model: hypothetical-goal win-probability
//! deltas, added goal value, counterfactual scorelines and win-probability
//! stories.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bayes::{frame_outcome_probs, predict_match, DrawMode, PosteriorParams, PredictMode};
use crate::error::{Error, Result};
use crate::events::EventKind;
use crate::features::{FrameMatrix, FrameState, Side, NUM_FRAMES};
use crate::outcome::OutcomeProbs;

/// Win- and tie-probability change caused by one goal, from the scoring
/// team's perspective.
pub type GoalDelta = (f64, f64);

fn check_frame(t: u8) -> Result<()> {
    if (1..=NUM_FRAMES as u8).contains(&t) {
        Ok(())
    } else {
        Err(Error::Range(format!("frame {t} outside 1..=100")))
    }
}

/// Apply one hypothetical goal by `side` to a pair of frame states. Only
/// the score features move; rolling form is deliberately left alone since
/// the counterfactual is a goal right now, not a rewritten history.
fn apply_goal(home: &mut FrameState, away: &mut FrameState, side: Side) {
    match side {
        Side::Home => {
            home.score_diff += 1;
            home.goals += 1;
            away.score_diff -= 1;
        }
        Side::Away => {
            away.score_diff += 1;
            away.goals += 1;
            home.score_diff -= 1;
        }
    }
}

/// Remove one realized goal by `side` from the frame-`t` states, giving
/// the pre-goal baseline used by the added-goal-value pipeline.
pub fn pre_goal_states(m: &FrameMatrix, t: u8, side: Side) -> (FrameState, FrameState) {
    let mut home = *m.state(Side::Home, t);
    let mut away = *m.state(Side::Away, t);
    match side {
        Side::Home => {
            home.score_diff -= 1;
            home.goals = home.goals.saturating_sub(1);
            away.score_diff += 1;
        }
        Side::Away => {
            away.score_diff -= 1;
            away.goals = away.goals.saturating_sub(1);
            home.score_diff += 1;
        }
    }
    (home, away)
}

/// Goal delta from explicit baseline states.
pub fn goal_delta_states(
    home: &FrameState,
    away: &FrameState,
    params: &PosteriorParams,
    side: Side,
) -> GoalDelta {
    let base = frame_outcome_probs(home, away, params, DrawMode::Mean);
    let mut home_after = *home;
    let mut away_after = *away;
    apply_goal(&mut home_after, &mut away_after, side);
    let after = frame_outcome_probs(&home_after, &away_after, params, DrawMode::Mean);
    let (base, after) = match side {
        Side::Home => (base, after),
        Side::Away => (base.flipped(), after.flipped()),
    };
    (after.win - base.win, after.tie - base.tie)
}

/// Win/tie probability change if `side` scored right now, holding every
/// other feature at its frame-`t` value. The matrix's frame-`t` score is
/// the pre-goal baseline.
pub fn goal_delta(
    m: &FrameMatrix,
    params: &PosteriorParams,
    t: u8,
    side: Side,
) -> Result<GoalDelta> {
    check_frame(t)?;
    params.projection()?;
    Ok(goal_delta_states(m.state(Side::Home, t), m.state(Side::Away, t), params, side))
}

/// One scored goal to be valued.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GoalEntry {
    pub player: String,
    pub match_id: String,
    pub frame: u8,
}

/// Added-goal-value summary for one player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgvRecord {
    pub player: String,
    pub goals: u32,
    pub minutes: f64,
    /// Expected-league-points boost per 90 minutes from the player's
    /// goals: `sum(3 * d_win + d_tie) / minutes * 90`.
    pub agv_p90: f64,
}

/// Compute added goal value per 90 minutes for every player.
///
/// `params` must be fit without the pre-game rating feature, otherwise
/// strong teams' goals would be undervalued from the start. Players with
/// minutes but no goals score zero; players with goals but no minutes are
/// skipped with a warning.
pub fn agv_p90(
    goals: &[GoalEntry],
    minutes: &BTreeMap<String, f64>,
    matrices: &[FrameMatrix],
    params: &PosteriorParams,
) -> Result<(Vec<AgvRecord>, Vec<String>)> {
    if params.feature_names.iter().any(|n| n == "rating_diff") {
        return Err(Error::Range(
            "added goal value requires a model fit without rating_diff".into(),
        ));
    }
    params.projection()?;

    let by_id: BTreeMap<&str, &FrameMatrix> =
        matrices.iter().map(|m| (m.match_id.as_str(), m)).collect();

    let mut warnings = Vec::new();
    let mut boost: BTreeMap<&str, (u32, f64)> = BTreeMap::new();
    for goal in goals {
        check_frame(goal.frame)?;
        let Some(matrix) = by_id.get(goal.match_id.as_str()) else {
            warnings.push(format!(
                "goal by {} in unknown match {}; skipped",
                goal.player, goal.match_id
            ));
            continue;
        };
        // attribute the goal to a side via the frame's scorers
        let mut sides = matrix
            .goal_frames
            .iter()
            .filter(|(t, _)| *t == goal.frame)
            .map(|(_, side)| *side);
        let side = match (sides.next(), sides.next()) {
            (Some(side), None) => side,
            (Some(first), Some(second)) if second == first => first,
            (None, _) => {
                warnings.push(format!(
                    "no goal recorded at frame {} of {}; skipped",
                    goal.frame, goal.match_id
                ));
                continue;
            }
            _ => {
                warnings.push(format!(
                    "colliding goals from both sides at frame {} of {}; skipped",
                    goal.frame, goal.match_id
                ));
                continue;
            }
        };
        let (home, away) = pre_goal_states(matrix, goal.frame, side);
        let (d_win, d_tie) = goal_delta_states(&home, &away, params, side);
        let entry = boost.entry(goal.player.as_str()).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 += 3.0 * d_win + d_tie;
    }

    let mut records = Vec::new();
    for (player, &mins) in minutes {
        let (goals_count, total) = boost.get(player.as_str()).copied().unwrap_or((0, 0.0));
        if mins <= 0.0 {
            if goals_count > 0 {
                warnings.push(format!("player {player} has goals but zero minutes; excluded"));
            }
            continue;
        }
        records.push(AgvRecord {
            player: player.clone(),
            goals: goals_count,
            minutes: mins,
            agv_p90: total / mins * 90.0,
        });
    }
    for player in boost.keys() {
        if !minutes.contains_key(*player) {
            warnings.push(format!("player {player} has goals but no minutes entry; excluded"));
        }
    }
    Ok((records, warnings))
}

/// Optional feature overrides applied in counterfactual sweeps.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Overrides {
    /// Forced (home goals, away goals) scoreline.
    pub score: Option<(u32, u32)>,
    /// Forced red-card difference, home perspective.
    pub red_diff: Option<i32>,
}

/// Per-frame home-perspective probabilities with overrides applied at
/// every frame of every match.
pub fn counterfactual_probs(
    matrices: &[FrameMatrix],
    params: &PosteriorParams,
    overrides: Overrides,
) -> Result<Vec<Vec<OutcomeProbs>>> {
    params.projection()?;
    let mut all = Vec::with_capacity(matrices.len());
    for m in matrices {
        let mut per_frame = Vec::with_capacity(NUM_FRAMES);
        for t in 1..=NUM_FRAMES as u8 {
            let mut home = *m.state(Side::Home, t);
            let mut away = *m.state(Side::Away, t);
            if let Some((h, a)) = overrides.score {
                home.goals = h;
                away.goals = a;
                home.score_diff = h as i32 - a as i32;
                away.score_diff = -home.score_diff;
            }
            if let Some(rd) = overrides.red_diff {
                home.red_diff = rd;
                away.red_diff = -rd;
            }
            per_frame.push(frame_outcome_probs(&home, &away, params, DrawMode::Mean));
        }
        all.push(per_frame);
    }
    Ok(all)
}

/// Distribution summary of one frame's counterfactual win probabilities.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FrameSummary {
    pub t: u8,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Counterfactual scoreline study: the leading team's win probability per
/// frame, summarized across matches.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterfactualCurve {
    /// Side whose win probability is aggregated: home unless the forced
    /// scoreline favours the away team.
    pub leading: Side,
    pub frames: Vec<FrameSummary>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Force a scoreline at every frame of every match and summarize the
/// leading team's win probability per frame.
pub fn counterfactual_curve(
    matrices: &[FrameMatrix],
    params: &PosteriorParams,
    forced_score: (u32, u32),
    red_diff: Option<i32>,
) -> Result<CounterfactualCurve> {
    let overrides = Overrides { score: Some(forced_score), red_diff };
    let all = counterfactual_probs(matrices, params, overrides)?;
    let leading = if forced_score.1 > forced_score.0 { Side::Away } else { Side::Home };

    let mut frames = Vec::with_capacity(NUM_FRAMES);
    for t in 0..NUM_FRAMES {
        let mut values: Vec<f64> = all
            .iter()
            .map(|per_frame| match leading {
                Side::Home => per_frame[t].win,
                Side::Away => per_frame[t].loss,
            })
            .collect();
        values.sort_by(f64::total_cmp);
        frames.push(FrameSummary {
            t: (t + 1) as u8,
            min: values.first().copied().unwrap_or(f64::NAN),
            q1: quantile(&values, 0.25),
            median: quantile(&values, 0.5),
            q3: quantile(&values, 0.75),
            max: values.last().copied().unwrap_or(f64::NAN),
        });
    }
    Ok(CounterfactualCurve { leading, frames })
}

/// Timeline marker on a win-probability story.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoryMarker {
    pub t: u8,
    pub side: Side,
    pub kind: EventKind,
}

/// A match's win-probability graph with its goal and card annotations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StoryCurve {
    pub match_id: String,
    pub probs: Vec<OutcomeProbs>,
    pub markers: Vec<StoryMarker>,
}

/// Per-frame outcome probabilities joined with the match's goal and card
/// events, ready for plotting.
pub fn story_curve(m: &FrameMatrix, params: &PosteriorParams) -> Result<StoryCurve> {
    let probs = predict_match(m, params, PredictMode::Mean)?;
    let mut markers: Vec<StoryMarker> = m
        .goal_frames
        .iter()
        .map(|&(t, side)| StoryMarker { t, side, kind: EventKind::Goal })
        .collect();
    markers.extend(
        m.card_frames.iter().map(|c| StoryMarker { t: c.t, side: c.side, kind: c.kind }),
    );
    markers.sort_by_key(|m| m.t);
    Ok(StoryCurve { match_id: m.match_id.clone(), probs, markers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::{logit, test_params, FeatureSet};
    use crate::events::{MatchEvent, MatchHeader};
    use crate::features::{build_frames, Standardization, FEATURE_NAMES, NUM_FEATURES};
    use crate::ratings::RatingTable;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn identity_standardization() -> Standardization {
        Standardization {
            names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            means: vec![0.0; NUM_FEATURES],
            sds: vec![1.0; NUM_FEATURES],
        }
    }

    /// Constant-intensity model: theta = invlogit(beta) everywhere.
    fn constant_params(beta: f64, ha: f64) -> crate::bayes::PosteriorParams {
        test_params(
            FeatureSet::Full,
            vec![vec![0.0; NUM_FEATURES]; crate::features::NUM_FRAMES],
            beta,
            ha,
            identity_standardization(),
        )
    }

    fn empty_matrix(home_goals: u32, away_goals: u32, goal_frames: Vec<(u8, Side)>) -> FrameMatrix {
        let header = MatchHeader {
            match_id: "m".into(),
            home_team_id: "h".into(),
            away_team_id: "a".into(),
            final_home_goals: home_goals,
            final_away_goals: away_goals,
            period_durations: [2700, 2700],
        };
        let events: Vec<MatchEvent> = goal_frames
            .iter()
            .map(|&(t, side)| {
                let (period, second) = crate::simgen::frame_second(t, header.period_durations);
                MatchEvent {
                    match_id: "m".into(),
                    period,
                    second,
                    team_id: if side == Side::Home { "h".into() } else { "a".into() },
                    player_id: None,
                    kind: EventKind::Goal,
                    x: 0.9,
                    y: 0.5,
                    success: true,
                    end_x: None,
                }
            })
            .collect();
        build_frames(&header, &events, &RatingTable::default())
    }

    #[test]
    fn endgame_delta_is_zero_or_one() {
        let params = constant_params(logit(0.02), 0.0);
        // level at full time: the goal decides it
        let m = empty_matrix(0, 0, vec![]);
        let (d_win, d_tie) = goal_delta(&m, &params, 100, Side::Home).unwrap();
        assert_abs_diff_eq!(d_win, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d_tie, -1.0, epsilon = 1e-12);
        // already leading: a second goal changes nothing at t=100
        let m = empty_matrix(1, 0, vec![(30, Side::Home)]);
        let (d_win, _) = goal_delta(&m, &params, 100, Side::Home).unwrap();
        assert_abs_diff_eq!(d_win, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn mid_game_symmetry() {
        let params = constant_params(logit(0.03), 0.0);
        let m = empty_matrix(0, 0, vec![]);
        let (home_gain, _) = goal_delta(&m, &params, 55, Side::Home).unwrap();
        let (away_gain, _) = goal_delta(&m, &params, 55, Side::Away).unwrap();
        assert_abs_diff_eq!(home_gain, away_gain, epsilon = 1e-9);
        assert!(home_gain > 0.0);
    }

    #[test]
    fn scoring_never_hurts_anywhere() {
        let params = constant_params(logit(0.025), 0.3);
        let m = empty_matrix(1, 1, vec![(20, Side::Home), (70, Side::Away)]);
        for t in 1..=100u8 {
            for side in [Side::Home, Side::Away] {
                let (d_win, _) = goal_delta(&m, &params, t, side).unwrap();
                assert!(d_win >= -1e-12, "t={t} side={side:?} delta={d_win}");
            }
        }
    }

    #[test]
    fn goal_delta_matches_monte_carlo() {
        // score 0-0 at t=85, constant theta 0.03 both sides: the frozen
        // intensity is the true process, so rollouts are an oracle
        let theta: f64 = 0.03;
        let params = constant_params(logit(theta), 0.0);
        let m = empty_matrix(0, 0, vec![]);
        let (d_win, _) = goal_delta(&m, &params, 85, Side::Home).unwrap();

        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let rollouts = 100_000;
        let frames_left = 15;
        let mut wins_base = 0u32;
        let mut wins_up = 0u32;
        for _ in 0..rollouts {
            let mut diff = 0i32;
            let mut diff_up = 1i32;
            for _ in 0..frames_left {
                let h = rng.gen_bool(theta);
                let a = rng.gen_bool(theta);
                let step = (h as i32) - (a as i32);
                diff += step;
                diff_up += step;
            }
            wins_base += (diff > 0) as u32;
            wins_up += (diff_up > 0) as u32;
        }
        let mc = (wins_up as f64 - wins_base as f64) / rollouts as f64;
        assert!(
            (d_win - mc).abs() <= 0.02,
            "model delta {d_win:.4} vs monte carlo {mc:.4}"
        );
    }

    fn minutes_of(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(p, m)| (p.to_string(), *m)).collect()
    }

    #[test]
    fn agv_requires_strength_free_model() {
        let params = constant_params(logit(0.02), 0.0);
        let err = agv_p90(&[], &minutes_of(&[]), &[], &params);
        assert!(err.is_err());
    }

    fn nostrength_params(beta: f64) -> crate::bayes::PosteriorParams {
        let names = FeatureSet::NoRating.names();
        let f = names.len();
        test_params(
            FeatureSet::NoRating,
            vec![vec![0.0; f]; crate::features::NUM_FRAMES],
            beta,
            0.0,
            Standardization {
                names: names.iter().map(|s| s.to_string()).collect(),
                means: vec![0.0; f],
                sds: vec![1.0; f],
            },
        )
    }

    #[test]
    fn agv_arithmetic() {
        let params = nostrength_params(logit(0.02));
        // goalless player over any minutes scores exactly zero
        let (records, warnings) =
            agv_p90(&[], &minutes_of(&[("idle", 900.0)]), &[], &params).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].agv_p90, 0.0);
        assert!(warnings.is_empty());

        // a last-second winner at 0-0 is worth the full 2 points over a
        // tie: 3 * 1 + (-1) = 2... measured per Eq: 3*d_win + d_tie with
        // d_win = 1, d_tie = -1 gives 2; but a winner from nothing at
        // t=100 in a lost... use a match that ends 1-0 via that goal:
        let m = empty_matrix(1, 0, vec![(100, Side::Home)]);
        let goals = vec![GoalEntry { player: "hero".into(), match_id: "m".into(), frame: 100 }];
        let (records, warnings) =
            agv_p90(&goals, &minutes_of(&[("hero", 90.0)]), &[m], &params).unwrap();
        assert!(warnings.is_empty(), "{warnings:?}");
        assert_eq!(records[0].goals, 1);
        // d_win = 1, d_tie = -1: 3*1 - 1 = 2 -> 2 / 90 * 90 = 2.0
        assert_abs_diff_eq!(records[0].agv_p90, 2.0, epsilon = 1e-9);

        // zero minutes with a goal is excluded with a warning
        let m = empty_matrix(1, 0, vec![(100, Side::Home)]);
        let goals = vec![GoalEntry { player: "ghost".into(), match_id: "m".into(), frame: 100 }];
        let (records, warnings) =
            agv_p90(&goals, &minutes_of(&[("ghost", 0.0)]), &[m], &params).unwrap();
        assert!(records.is_empty());
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn agv_is_linear_in_goal_entries() {
        let params = nostrength_params(logit(0.025));
        let m1 = empty_matrix(1, 0, vec![(40, Side::Home)]);
        let mut m2 = empty_matrix(2, 1, vec![(10, Side::Home), (55, Side::Home), (80, Side::Away)]);
        m2.match_id = "m2".into();
        let all = vec![
            GoalEntry { player: "p".into(), match_id: "m".into(), frame: 40 },
            GoalEntry { player: "p".into(), match_id: "m2".into(), frame: 10 },
            GoalEntry { player: "p".into(), match_id: "m2".into(), frame: 55 },
        ];
        let minutes = minutes_of(&[("p", 180.0)]);
        let matrices = vec![m1, m2];
        let (combined, _) = agv_p90(&all, &minutes, &matrices, &params).unwrap();
        let (first, _) = agv_p90(&all[..1], &minutes, &matrices, &params).unwrap();
        let (rest, _) = agv_p90(&all[1..], &minutes, &matrices, &params).unwrap();
        assert_abs_diff_eq!(
            combined[0].agv_p90,
            first[0].agv_p90 + rest[0].agv_p90,
            epsilon = 1e-12
        );
    }

    #[test]
    fn counterfactual_blowout_is_safe_and_dominance_holds() {
        let params = constant_params(logit(0.02), 0.0);
        let matrices: Vec<FrameMatrix> =
            (0..4).map(|i| {
                let mut m = empty_matrix(0, 0, vec![]);
                m.match_id = format!("m{i}");
                m
            }).collect();
        let five_nil = counterfactual_curve(&matrices, &params, (5, 0), None).unwrap();
        assert!(five_nil.frames[94].median >= 0.999);

        // forced 0-0: home and away curves mirror each other under ha = 0
        let level = counterfactual_probs(&matrices, &params, Overrides { score: Some((0, 0)), red_diff: None }).unwrap();
        for per_frame in &level {
            for p in per_frame {
                assert_abs_diff_eq!(p.win, p.loss, epsilon = 1e-9);
            }
        }

        // an extra goal for the leader dominates pointwise
        let two_nil =
            counterfactual_probs(&matrices, &params, Overrides { score: Some((2, 0)), red_diff: None }).unwrap();
        let one_nil =
            counterfactual_probs(&matrices, &params, Overrides { score: Some((1, 0)), red_diff: None }).unwrap();
        for (a, b) in two_nil.iter().flatten().zip(one_nil.iter().flatten()) {
            assert!(a.win >= b.win - 1e-12);
        }
    }

    #[test]
    fn story_curve_jumps_only_at_score_changes() {
        let params = constant_params(logit(0.02), 0.0);
        let m = empty_matrix(1, 0, vec![(40, Side::Home)]);
        let story = story_curve(&m, &params).unwrap();
        assert_eq!(story.markers, vec![StoryMarker { t: 40, side: Side::Home, kind: EventKind::Goal }]);
        // discontinuity exactly at the goal frame
        let jump = (story.probs[39].win - story.probs[38].win).abs();
        assert!(jump > 0.1, "goal should move the curve, jump={jump}");
        // elsewhere consecutive frames drift smoothly
        for t in 1..NUM_FRAMES {
            if t == 39 {
                continue;
            }
            let step = (story.probs[t].win - story.probs[t - 1].win).abs();
            assert!(step < 0.05, "unexpected jump {step} at frame {}", t + 1);
        }
    }

    #[test]
    fn flat_story_for_event_free_match() {
        // without events the curves are driven by the rating gap alone and
        // stay smooth
        let params = constant_params(logit(0.02), 0.2);
        let m = empty_matrix(0, 0, vec![]);
        let story = story_curve(&m, &params).unwrap();
        assert!(story.markers.is_empty());
        assert!(story.probs[0].win > story.probs[0].loss); // home advantage
    }
}
