//! Per-frame game-state features.
//!
//! Every match is split into 100 frames, 50 per half, each covering the
//! same percentage of its half's actual duration (stoppage time included).
//! For each frame and each team we compute the eight model features:
//! game time, score differential, own goals, own yellow cards, red-card
//! differential, rolling attacking passes, rolling duel strength and the
//! pre-game rating differential.
//!
//! Cumulative features reflect events in frames `<= t`; rolling features
//! average the strictly previous frames `max(1, t-10) .. t-1`.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{attacking_pass, EventKind, MatchEvent, MatchHeader};
use crate::outcome::Outcome;
use crate::ratings::RatingTable;

pub const NUM_FRAMES: usize = 100;
pub const FRAMES_PER_HALF: u32 = 50;
/// Rolling features look back over this many completed frames.
pub const ROLLING_WINDOW: usize = 10;
pub const NUM_FEATURES: usize = 8;

/// Canonical feature order used by every model in the crate.
pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "game_time",
    "score_diff",
    "goals",
    "yellows",
    "red_diff",
    "attacking_passes",
    "duel_strength",
    "rating_diff",
];

/// Index of `rating_diff` in [`FEATURE_NAMES`], dropped by the
/// pre-game-strength-free model variant.
pub const RATING_DIFF_INDEX: usize = 7;

/// Neutral duel strength when a window contains no duels.
pub const NEUTRAL_DUEL_STRENGTH: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Home,
    Away,
}

impl Side {
    pub fn opponent(self) -> Side {
        match self {
            Side::Home => Side::Away,
            Side::Away => Side::Home,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Home => "home",
            Side::Away => "away",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "home" => Ok(Side::Home),
            "away" => Ok(Side::Away),
            other => Err(format!("unknown side `{other}`")),
        }
    }
}

/// One team's view of the game state at the end of one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameState {
    /// Frame index, 1-based.
    pub t: u8,
    /// Fraction of the match completed, `t / 100`.
    pub game_time: f64,
    /// Own goals minus opponent goals.
    pub score_diff: i32,
    /// Own goals scored so far.
    pub goals: u32,
    /// Own yellow cards so far.
    pub yellows: u32,
    /// Own red cards minus opponent red cards.
    pub red_diff: i32,
    /// Mean successful attacking passes per frame over the previous window.
    pub attacking_passes: f64,
    /// Mean duel-win fraction over the previous window.
    pub duel_strength: f64,
    /// Pre-game Elo points, own minus opponent.
    pub rating_diff: f64,
}

impl FrameState {
    /// Feature vector in [`FEATURE_NAMES`] order.
    pub fn features(&self) -> [f64; NUM_FEATURES] {
        [
            self.game_time,
            self.score_diff as f64,
            self.goals as f64,
            self.yellows as f64,
            self.red_diff as f64,
            self.attacking_passes,
            self.duel_strength,
            self.rating_diff,
        ]
    }
}

/// Card marker kept for win-probability story annotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardMarker {
    pub t: u8,
    pub side: Side,
    pub kind: EventKind,
}

/// Both teams' frame sequences for one match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameMatrix {
    pub match_id: String,
    pub home_team_id: String,
    pub away_team_id: String,
    /// 100 per-frame states for the home team.
    pub home: Vec<FrameState>,
    /// 100 per-frame states for the away team.
    pub away: Vec<FrameState>,
    /// Final result from the home perspective.
    pub outcome: Outcome,
    /// Frames in which goals landed, in event order. A frame may appear
    /// more than once when goals collide.
    pub goal_frames: Vec<(u8, Side)>,
    /// Yellow/red card frames, kept for story annotations.
    pub card_frames: Vec<CardMarker>,
    /// Events whose clock exceeded the stated period duration and were
    /// clamped into the period's last frame.
    pub clamped_events: u32,
}

impl FrameMatrix {
    pub fn state(&self, side: Side, t: u8) -> &FrameState {
        let seq = match side {
            Side::Home => &self.home,
            Side::Away => &self.away,
        };
        &seq[(t - 1) as usize]
    }
}

/// Map a period clock to a frame in 1..=100.
///
/// Each half covers 50 frames scaled to its actual duration, so half-time
/// always falls on the frame-50/51 boundary regardless of stoppage time.
/// Seconds beyond the stated duration clamp into the half's last frame.
pub fn frame_index(period: u8, second: u32, durations: [u32; 2]) -> u8 {
    debug_assert!((1..=2).contains(&period));
    let duration = durations[(period - 1) as usize].max(1) as u64;
    let scaled = (FRAMES_PER_HALF as u64 * second as u64).div_ceil(duration);
    let within_half = scaled.clamp(1, FRAMES_PER_HALF as u64) as u8;
    if period == 1 {
        within_half
    } else {
        FRAMES_PER_HALF as u8 + within_half
    }
}

/// Per-frame tallies for one team, indexed 1..=100 (slot 0 unused).
#[derive(Debug, Clone, Default)]
struct FrameTallies {
    goals: Vec<u32>,
    yellows: Vec<u32>,
    reds: Vec<u32>,
    attacking_passes: Vec<u32>,
    duel_wins: Vec<u32>,
}

impl FrameTallies {
    fn new() -> Self {
        Self {
            goals: vec![0; NUM_FRAMES + 1],
            yellows: vec![0; NUM_FRAMES + 1],
            reds: vec![0; NUM_FRAMES + 1],
            attacking_passes: vec![0; NUM_FRAMES + 1],
            duel_wins: vec![0; NUM_FRAMES + 1],
        }
    }
}

/// Build the full 100-frame feature matrix for one match.
pub fn build_frames(
    header: &MatchHeader,
    events: &[MatchEvent],
    ratings: &RatingTable,
) -> FrameMatrix {
    let mut home = FrameTallies::new();
    let mut away = FrameTallies::new();
    let mut duels_per_frame = vec![0u32; NUM_FRAMES + 1];
    let mut goal_frames = Vec::new();
    let mut card_frames = Vec::new();
    let mut clamped_events = 0u32;

    for e in events {
        let side = if e.team_id == header.home_team_id {
            Side::Home
        } else if e.team_id == header.away_team_id {
            Side::Away
        } else {
            debug_assert!(false, "event team not in header");
            continue;
        };
        if e.second > header.period_durations[(e.period - 1) as usize] {
            clamped_events += 1;
        }
        let t = frame_index(e.period, e.second, header.period_durations) as usize;
        let (own, opp) = match side {
            Side::Home => (&mut home, &mut away),
            Side::Away => (&mut away, &mut home),
        };
        match e.kind {
            EventKind::Goal => {
                own.goals[t] += 1;
                goal_frames.push((t as u8, side));
            }
            EventKind::YellowCard => {
                own.yellows[t] += 1;
                card_frames.push(CardMarker { t: t as u8, side, kind: e.kind });
            }
            EventKind::RedCard => {
                own.reds[t] += 1;
                card_frames.push(CardMarker { t: t as u8, side, kind: e.kind });
            }
            EventKind::Duel => {
                duels_per_frame[t] += 1;
                // a duel is a contest: the acting team wins on success,
                // otherwise the opponent does
                if e.success {
                    own.duel_wins[t] += 1;
                } else {
                    opp.duel_wins[t] += 1;
                }
            }
            EventKind::Pass => {
                if attacking_pass(e) {
                    own.attacking_passes[t] += 1;
                }
            }
            _ => {}
        }
    }

    let rating_diff = ratings.rating_diff(&header.home_team_id, &header.away_team_id);
    let home_states = build_side(&home, &away, &duels_per_frame, rating_diff);
    let away_states = build_side(&away, &home, &duels_per_frame, -rating_diff);

    let outcome = Outcome::from_score_diff(
        header.final_home_goals as i32 - header.final_away_goals as i32,
    );

    FrameMatrix {
        match_id: header.match_id.clone(),
        home_team_id: header.home_team_id.clone(),
        away_team_id: header.away_team_id.clone(),
        home: home_states,
        away: away_states,
        outcome,
        goal_frames,
        card_frames,
        clamped_events,
    }
}

fn build_side(
    own: &FrameTallies,
    opp: &FrameTallies,
    duels_per_frame: &[u32],
    rating_diff: f64,
) -> Vec<FrameState> {
    // per-frame duel-win fraction, neutral when the frame has no duels
    let duel_frac: Vec<f64> = (0..=NUM_FRAMES)
        .map(|t| {
            if duels_per_frame[t] == 0 {
                NEUTRAL_DUEL_STRENGTH
            } else {
                own.duel_wins[t] as f64 / duels_per_frame[t] as f64
            }
        })
        .collect();

    let mut states = Vec::with_capacity(NUM_FRAMES);
    let mut goals = 0u32;
    let mut opp_goals = 0u32;
    let mut yellows = 0u32;
    let mut reds = 0i32;
    let mut opp_reds = 0i32;

    for t in 1..=NUM_FRAMES {
        goals += own.goals[t];
        opp_goals += opp.goals[t];
        yellows += own.yellows[t];
        reds += own.reds[t] as i32;
        opp_reds += opp.reds[t] as i32;

        states.push(FrameState {
            t: t as u8,
            game_time: t as f64 / NUM_FRAMES as f64,
            score_diff: goals as i32 - opp_goals as i32,
            goals,
            yellows,
            red_diff: reds - opp_reds,
            attacking_passes: rolling_mean_counts(&own.attacking_passes, t),
            duel_strength: rolling_mean(&duel_frac, t, NEUTRAL_DUEL_STRENGTH),
            rating_diff,
        });
    }
    states
}

/// Mean of `values[max(1, t-10) .. t-1]`, or `empty` when t = 1.
fn rolling_mean(values: &[f64], t: usize, empty: f64) -> f64 {
    let lo = t.saturating_sub(ROLLING_WINDOW).max(1);
    if t == 1 {
        return empty;
    }
    let window = &values[lo..t];
    window.iter().sum::<f64>() / window.len() as f64
}

fn rolling_mean_counts(counts: &[u32], t: usize) -> f64 {
    let lo = t.saturating_sub(ROLLING_WINDOW).max(1);
    if t == 1 {
        return 0.0;
    }
    let window = &counts[lo..t];
    window.iter().map(|&c| c as f64).sum::<f64>() / window.len() as f64
}

/// One observation row for goal-intensity models: the state entering a
/// frame, paired with whether the team scored in that frame.
///
/// Cumulative features are taken at the end of the previous frame so the
/// predictors never contain the goal they are asked to predict; rolling
/// features already exclude the current frame by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelRow {
    pub side: Side,
    pub t: u8,
    /// Raw (unstandardized) features in [`FEATURE_NAMES`] order.
    pub features: [f64; NUM_FEATURES],
    /// Whether the team scored at least one goal in frame `t`.
    pub scored: bool,
}

/// Expand a frame matrix into the 200 per-frame training rows (100 per
/// side) used by the goal-intensity model and the synthetic generator.
pub fn model_rows(matrix: &FrameMatrix) -> Vec<ModelRow> {
    let mut rows = Vec::with_capacity(2 * NUM_FRAMES);
    for (side, states) in [(Side::Home, &matrix.home), (Side::Away, &matrix.away)] {
        for t in 1..=NUM_FRAMES {
            let current = &states[t - 1];
            let prev = if t >= 2 { Some(&states[t - 2]) } else { None };
            let (score_diff, goals, yellows, red_diff) = match prev {
                Some(p) => (p.score_diff, p.goals, p.yellows, p.red_diff),
                None => (0, 0, 0, 0),
            };
            let scored = current.goals > prev.map_or(0, |p| p.goals);
            rows.push(ModelRow {
                side,
                t: t as u8,
                features: [
                    current.game_time,
                    score_diff as f64,
                    goals as f64,
                    yellows as f64,
                    red_diff as f64,
                    current.attacking_passes,
                    current.duel_strength,
                    current.rating_diff,
                ],
                scored,
            });
        }
    }
    rows
}

/// Per-feature standardization statistics, persisted with every fitted
/// model so prediction sees the training-set scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub names: Vec<String>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

impl Standardization {
    /// Fit means and standard deviations over raw feature rows. Features
    /// with zero variance get sd 1 so they standardize to zero.
    pub fn fit<'a, I>(names: &[&str], rows: I) -> Self
    where
        I: IntoIterator<Item = &'a [f64]>,
        I::IntoIter: Clone,
    {
        let d = names.len();
        let rows = rows.into_iter();
        let mut count = 0usize;
        let mut means = vec![0.0; d];
        let mut sq = vec![0.0; d];
        for row in rows {
            debug_assert_eq!(row.len(), d);
            count += 1;
            for (i, &v) in row.iter().enumerate() {
                means[i] += v;
                sq[i] += v * v;
            }
        }
        let n = count.max(1) as f64;
        for m in &mut means {
            *m /= n;
        }
        let sds: Vec<f64> = (0..d)
            .map(|i| {
                let var = (sq[i] / n - means[i] * means[i]).max(0.0);
                let sd = var.sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Self { names: names.iter().map(|s| s.to_string()).collect(), means, sds }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn apply(&self, raw: &[f64], out: &mut [f64]) {
        debug_assert_eq!(raw.len(), self.means.len());
        for i in 0..raw.len() {
            out[i] = (raw[i] - self.means[i]) / self.sds[i];
        }
    }

    pub fn apply_vec(&self, raw: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; raw.len()];
        self.apply(raw, &mut out);
        out
    }

    /// Indices of `self.names` inside the canonical feature list, erroring
    /// with the missing names otherwise.
    pub fn projection(&self, available: &[&str]) -> Result<Vec<usize>> {
        let mut idx = Vec::with_capacity(self.names.len());
        let mut missing = Vec::new();
        for name in &self.names {
            match available.iter().position(|a| a == name) {
                Some(i) => idx.push(i),
                None => missing.push(name.clone()),
            }
        }
        if missing.is_empty() {
            Ok(idx)
        } else {
            Err(Error::SchemaMismatch { missing })
        }
    }
}

// ---------------------------------------------------------------------------
// Extended feature catalog
// ---------------------------------------------------------------------------

/// Pitch-length fraction where the opponent's penalty box begins
/// (16.5 m of a 105 m pitch).
pub const PENALTY_BOX_X: f64 = 0.84;

pub const EXTENDED_FEATURE_NAMES: [&str; 18] = [
    "shots",
    "shots_on_target",
    "well_positioned_shots",
    "opportunities",
    "attacking_third_passes",
    "attacking_third_pass_success",
    "crosses",
    "box_entries",
    "tackle_success",
    "tempo",
    "avg_x",
    "possession",
    "pass_length",
    "attacking_pass_length",
    "backward_pass_fraction",
    "attacking_tackles",
    "attacking_tackle_success",
    "frames_since_goal",
];

pub type ExtendedFrame = BTreeMap<&'static str, f64>;

/// Extended per-frame features for both sides; `home[t-1]` and
/// `away[t-1]` describe frame `t`. Rates with an empty denominator are
/// absent from the map rather than defaulted.
#[derive(Debug, Clone)]
pub struct ExtendedFrames {
    pub home: Vec<ExtendedFrame>,
    pub away: Vec<ExtendedFrame>,
}

/// Cumulative per-team accumulators for the extended catalog.
#[derive(Debug, Clone, Copy, Default)]
struct ExtendedAcc {
    shots: u32,
    shots_on_target: u32,
    well_positioned: u32,
    opportunities: u32,
    att_passes: u32,
    att_pass_success: u32,
    crosses: u32,
    box_entries: u32,
    duels: u32,
    duel_success: u32,
    actions: u32,
    x_sum: f64,
    passes_with_end: u32,
    pass_length_sum: f64,
    att_passes_with_end: u32,
    att_pass_length_sum: f64,
    backward_passes: u32,
    att_duels: u32,
    att_duel_success: u32,
    last_goal_frame: Option<u32>,
}

impl ExtendedAcc {
    fn add(&mut self, e: &MatchEvent, t: u32) {
        self.actions += 1;
        self.x_sum += e.x;
        let is_shot = matches!(e.kind, EventKind::Shot | EventKind::Goal);
        if is_shot {
            self.shots += 1;
            // goals are on target by definition
            if e.kind == EventKind::Goal || e.success {
                self.shots_on_target += 1;
            }
            if e.x > 2.0 / 3.0 {
                self.opportunities += 1;
                if (1.0 / 3.0..=2.0 / 3.0).contains(&e.y) {
                    self.well_positioned += 1;
                }
            }
        }
        if e.kind == EventKind::Goal {
            self.last_goal_frame = Some(t);
        }
        if e.kind == EventKind::Pass {
            if e.x > 2.0 / 3.0 {
                self.att_passes += 1;
                if e.success {
                    self.att_pass_success += 1;
                }
            }
            if let Some(end_x) = e.end_x {
                self.passes_with_end += 1;
                self.pass_length_sum += (end_x - e.x).abs();
                if e.x > 2.0 / 3.0 {
                    self.att_passes_with_end += 1;
                    self.att_pass_length_sum += (end_x - e.x).abs();
                }
                if end_x < e.x {
                    self.backward_passes += 1;
                }
                if !(0.2..=0.8).contains(&e.y) && end_x >= PENALTY_BOX_X {
                    self.crosses += 1;
                }
            }
        }
        if e.kind == EventKind::Duel {
            self.duels += 1;
            if e.success {
                self.duel_success += 1;
            }
            if e.x > 2.0 / 3.0 {
                self.att_duels += 1;
                if e.success {
                    self.att_duel_success += 1;
                }
            }
        }
        let end_point = e.end_x.unwrap_or(e.x);
        if end_point >= PENALTY_BOX_X {
            self.box_entries += 1;
        }
    }

    fn snapshot(&self, t: u32, tempo: u32, total_actions: u32) -> ExtendedFrame {
        let mut m = ExtendedFrame::new();
        m.insert("shots", self.shots as f64);
        m.insert("shots_on_target", self.shots_on_target as f64);
        m.insert("well_positioned_shots", self.well_positioned as f64);
        m.insert("opportunities", self.opportunities as f64);
        m.insert("attacking_third_passes", self.att_passes as f64);
        if self.att_passes > 0 {
            m.insert(
                "attacking_third_pass_success",
                self.att_pass_success as f64 / self.att_passes as f64,
            );
        }
        m.insert("crosses", self.crosses as f64);
        m.insert("box_entries", self.box_entries as f64);
        if self.duels > 0 {
            m.insert("tackle_success", self.duel_success as f64 / self.duels as f64);
        }
        m.insert("tempo", tempo as f64);
        if self.actions > 0 {
            m.insert("avg_x", self.x_sum / self.actions as f64);
        }
        if total_actions > 0 {
            m.insert("possession", self.actions as f64 / total_actions as f64);
        }
        if self.passes_with_end > 0 {
            m.insert("pass_length", self.pass_length_sum / self.passes_with_end as f64);
            m.insert(
                "backward_pass_fraction",
                self.backward_passes as f64 / self.passes_with_end as f64,
            );
        }
        if self.att_passes_with_end > 0 {
            m.insert(
                "attacking_pass_length",
                self.att_pass_length_sum / self.att_passes_with_end as f64,
            );
        }
        m.insert("attacking_tackles", self.att_duels as f64);
        if self.att_duels > 0 {
            m.insert(
                "attacking_tackle_success",
                self.att_duel_success as f64 / self.att_duels as f64,
            );
        }
        if let Some(g) = self.last_goal_frame {
            m.insert("frames_since_goal", (t - g) as f64);
        }
        m
    }
}

/// Compute the extended feature catalog per frame for both teams.
pub fn extended_features(header: &MatchHeader, events: &[MatchEvent]) -> ExtendedFrames {
    // bucket events by frame first so each frame's snapshot is cumulative
    let mut by_frame: Vec<Vec<&MatchEvent>> = vec![Vec::new(); NUM_FRAMES + 1];
    for e in events {
        let t = frame_index(e.period, e.second, header.period_durations) as usize;
        by_frame[t].push(e);
    }

    let mut home_acc = ExtendedAcc::default();
    let mut away_acc = ExtendedAcc::default();
    let mut home = Vec::with_capacity(NUM_FRAMES);
    let mut away = Vec::with_capacity(NUM_FRAMES);

    for t in 1..=NUM_FRAMES {
        let mut tempo_home = 0u32;
        let mut tempo_away = 0u32;
        for e in &by_frame[t] {
            if e.team_id == header.home_team_id {
                home_acc.add(e, t as u32);
                tempo_home += 1;
            } else {
                away_acc.add(e, t as u32);
                tempo_away += 1;
            }
        }
        let total = home_acc.actions + away_acc.actions;
        home.push(home_acc.snapshot(t as u32, tempo_home, total));
        away.push(away_acc.snapshot(t as u32, tempo_away, total));
    }

    ExtendedFrames { home, away }
}

// ---------------------------------------------------------------------------
// CSV round-trip for frame matrices
// ---------------------------------------------------------------------------

/// Write frame matrices as one row per (match, side, frame).
pub fn write_frames_csv<W: Write>(writer: W, matrices: &[FrameMatrix]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let mut header = vec!["match_id", "side", "team", "t"];
    header.extend(FEATURE_NAMES);
    header.push("outcome");
    csv.write_record(&header)?;

    for m in matrices {
        for (side, states, team) in [
            (Side::Home, &m.home, &m.home_team_id),
            (Side::Away, &m.away, &m.away_team_id),
        ] {
            for s in states {
                let mut record = vec![
                    m.match_id.clone(),
                    side.as_str().to_string(),
                    team.clone(),
                    s.t.to_string(),
                ];
                record.extend(s.features().iter().map(|v| v.to_string()));
                record.push(m.outcome.as_str().to_string());
                csv.write_record(&record)?;
            }
        }
    }
    csv.flush()?;
    Ok(())
}

/// Read frame matrices back from the CSV written by [`write_frames_csv`].
///
/// Goal frames are reconstructed from the goals column; card markers are
/// not representable in this format and come back empty.
pub fn read_frames_csv<R: Read>(reader: R) -> Result<Vec<FrameMatrix>> {
    #[derive(Deserialize)]
    struct Row {
        match_id: String,
        side: String,
        team: String,
        t: u8,
        game_time: f64,
        score_diff: i32,
        goals: u32,
        yellows: u32,
        red_diff: i32,
        attacking_passes: f64,
        duel_strength: f64,
        rating_diff: f64,
        outcome: String,
    }

    struct Partial {
        order: usize,
        home: Vec<FrameState>,
        away: Vec<FrameState>,
        home_team: String,
        away_team: String,
        outcome: Outcome,
    }

    let mut csv = csv::Reader::from_reader(reader);
    let mut partials: BTreeMap<String, Partial> = BTreeMap::new();
    let mut order = 0usize;

    for row in csv.deserialize() {
        let row: Row = row?;
        let side: Side = row
            .side
            .parse()
            .map_err(|e: String| Error::Validation { match_id: row.match_id.clone(), rule: e })?;
        let outcome: Outcome = row
            .outcome
            .parse()
            .map_err(|e: String| Error::Validation { match_id: row.match_id.clone(), rule: e })?;
        let state = FrameState {
            t: row.t,
            game_time: row.game_time,
            score_diff: row.score_diff,
            goals: row.goals,
            yellows: row.yellows,
            red_diff: row.red_diff,
            attacking_passes: row.attacking_passes,
            duel_strength: row.duel_strength,
            rating_diff: row.rating_diff,
        };
        let entry = partials.entry(row.match_id.clone()).or_insert_with(|| {
            order += 1;
            Partial {
                order,
                home: Vec::new(),
                away: Vec::new(),
                home_team: String::new(),
                away_team: String::new(),
                outcome,
            }
        });
        match side {
            Side::Home => {
                entry.home_team = row.team;
                entry.home.push(state);
            }
            Side::Away => {
                entry.away_team = row.team;
                entry.away.push(state);
            }
        }
    }

    let mut out: Vec<(usize, FrameMatrix)> = Vec::with_capacity(partials.len());
    for (match_id, p) in partials {
        for (side, states) in [("home", &p.home), ("away", &p.away)] {
            if states.len() != NUM_FRAMES {
                return Err(Error::Validation {
                    match_id: match_id.clone(),
                    rule: format!("{side} has {} frames, expected {NUM_FRAMES}", states.len()),
                });
            }
        }
        let mut goal_frames = Vec::new();
        for t in 1..=NUM_FRAMES {
            for (states, side) in [(&p.home, Side::Home), (&p.away, Side::Away)] {
                let prev = if t >= 2 { states[t - 2].goals } else { 0 };
                for _ in 0..states[t - 1].goals.saturating_sub(prev) {
                    goal_frames.push((t as u8, side));
                }
            }
        }
        out.push((
            p.order,
            FrameMatrix {
                match_id,
                home_team_id: p.home_team,
                away_team_id: p.away_team,
                home: p.home,
                away: p.away,
                outcome: p.outcome,
                goal_frames,
                card_frames: Vec::new(),
                clamped_events: 0,
            },
        ));
    }
    out.sort_by_key(|(order, _)| *order);
    Ok(out.into_iter().map(|(_, m)| m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::{EventKind, MatchEvent, MatchHeader};

    fn header() -> MatchHeader {
        MatchHeader {
            match_id: "m1".into(),
            home_team_id: "h".into(),
            away_team_id: "a".into(),
            final_home_goals: 0,
            final_away_goals: 0,
            period_durations: [2700, 2700],
        }
    }

    fn event(team: &str, period: u8, second: u32, kind: EventKind, success: bool) -> MatchEvent {
        MatchEvent {
            match_id: "m1".into(),
            period,
            second,
            team_id: team.into(),
            player_id: None,
            kind,
            x: 0.5,
            y: 0.5,
            success,
            end_x: None,
        }
    }

    #[test]
    fn frame_index_boundaries() {
        assert_eq!(frame_index(1, 0, [2700, 2700]), 1);
        assert_eq!(frame_index(1, 2700, [2700, 2700]), 50);
        assert_eq!(frame_index(2, 0, [2700, 2700]), 51);
        assert_eq!(frame_index(2, 2700, [2700, 2700]), 100);
        // actual-duration scaling: ceil(50 * 1400 / 2800) = 25
        assert_eq!(frame_index(1, 1400, [2800, 2700]), 25);
        // clock past the stated duration clamps into the half's last frame
        assert_eq!(frame_index(1, 3000, [2700, 2700]), 50);
        assert_eq!(frame_index(2, 9999, [2700, 2700]), 100);
    }

    #[test]
    fn frame_index_is_monotone() {
        let durations = [2856, 2941];
        let mut last = 0;
        for period in 1..=2u8 {
            for second in 0..=durations[(period - 1) as usize] {
                let t = frame_index(period, second, durations);
                assert!(t >= last, "frame decreased at {period}/{second}");
                last = t;
            }
        }
        assert_eq!(last, 100);
    }

    #[test]
    fn zero_event_match_is_flat() {
        let mut ratings = RatingTable::default();
        ratings.set("h", 1600.0);
        ratings.set("a", 1450.0);
        let m = build_frames(&header(), &[], &ratings);
        assert_eq!(m.outcome, Outcome::Tie);
        for t in 1..=NUM_FRAMES as u8 {
            let s = m.state(Side::Home, t);
            assert_eq!(s.score_diff, 0);
            assert_eq!(s.goals, 0);
            assert_eq!(s.yellows, 0);
            assert_eq!(s.red_diff, 0);
            assert_eq!(s.attacking_passes, 0.0);
            assert_eq!(s.duel_strength, NEUTRAL_DUEL_STRENGTH);
            assert_eq!(s.rating_diff, 150.0);
            assert_eq!(m.state(Side::Away, t).rating_diff, -150.0);
        }
    }

    #[test]
    fn single_goal_steps_cumulative_features() {
        let mut h = header();
        h.final_home_goals = 1;
        // frame 40 of period 1 covers seconds (2106, 2160]
        let goal = event("h", 1, 2140, EventKind::Goal, true);
        assert_eq!(frame_index(1, 2140, h.period_durations), 40);
        let m = build_frames(&h, &[goal], &RatingTable::default());
        for t in 1..=39u8 {
            assert_eq!(m.state(Side::Home, t).score_diff, 0, "t={t}");
            assert_eq!(m.state(Side::Home, t).goals, 0);
        }
        for t in 40..=100u8 {
            assert_eq!(m.state(Side::Home, t).score_diff, 1, "t={t}");
            assert_eq!(m.state(Side::Home, t).goals, 1);
            assert_eq!(m.state(Side::Away, t).score_diff, -1);
        }
        assert_eq!(m.goal_frames, vec![(40, Side::Home)]);
        assert_eq!(m.outcome, Outcome::Win);
    }

    #[test]
    fn duel_strength_sums_to_one() {
        let mut events = Vec::new();
        // seconds chosen to scatter duels across early frames
        for (i, &sec) in [60u32, 120, 200, 300, 500, 700].iter().enumerate() {
            events.push(event(if i % 2 == 0 { "h" } else { "a" }, 1, sec, EventKind::Duel, i % 3 == 0));
        }
        let m = build_frames(&header(), &events, &RatingTable::default());
        for t in 1..=NUM_FRAMES as u8 {
            let sum = m.state(Side::Home, t).duel_strength + m.state(Side::Away, t).duel_strength;
            assert!((sum - 1.0).abs() < 1e-12, "t={t} sum={sum}");
        }
    }

    #[test]
    fn rolling_window_is_strictly_previous() {
        let mut e = event("h", 1, 2140, EventKind::Pass, true);
        e.x = 0.5;
        e.end_x = Some(0.8);
        assert!(attacking_pass(&e));
        let m = build_frames(&header(), &[e], &RatingTable::default());
        // the pass lands in frame 40; frame 40 itself must not see it
        assert_eq!(m.state(Side::Home, 40).attacking_passes, 0.0);
        // frames 41..50 average it over windows that include frame 40
        let s41 = m.state(Side::Home, 41);
        assert!((s41.attacking_passes - 0.1).abs() < 1e-12);
        // by frame 51 the window is 41..50 and the pass has rolled out
        assert_eq!(m.state(Side::Home, 51).attacking_passes, 0.0);
    }

    #[test]
    fn mirror_property() {
        let mut ratings = RatingTable::default();
        ratings.set("h", 1550.0);
        ratings.set("a", 1500.0);
        let mut events = vec![
            event("h", 1, 500, EventKind::Goal, true),
            event("a", 1, 900, EventKind::YellowCard, true),
            event("a", 2, 100, EventKind::RedCard, true),
            event("h", 2, 300, EventKind::Duel, false),
            event("a", 2, 2000, EventKind::Goal, true),
        ];
        let mut pass = event("h", 1, 1200, EventKind::Pass, true);
        pass.end_x = Some(0.9);
        events.push(pass);
        events.sort_by_key(|e| (e.period, e.second));

        let mut h = header();
        h.final_home_goals = 1;
        h.final_away_goals = 1;
        let m = build_frames(&h, &events, &ratings);

        let mut swapped = h.clone();
        std::mem::swap(&mut swapped.home_team_id, &mut swapped.away_team_id);
        std::mem::swap(&mut swapped.final_home_goals, &mut swapped.final_away_goals);
        let m2 = build_frames(&swapped, &events, &ratings);

        assert_eq!(m.home, m2.away);
        assert_eq!(m.away, m2.home);
    }

    #[test]
    fn no_lookahead() {
        // features at frame t must not change when events after t are dropped
        let mut events = vec![
            event("h", 1, 500, EventKind::Goal, true),
            event("a", 1, 2650, EventKind::Duel, true),
            event("h", 2, 300, EventKind::YellowCard, true),
            event("a", 2, 2100, EventKind::Goal, true),
        ];
        events.sort_by_key(|e| (e.period, e.second));
        let mut h = header();
        h.final_home_goals = 1;
        h.final_away_goals = 1;
        let full = build_frames(&h, &events, &RatingTable::default());

        for cut in [10u8, 40, 60, 90] {
            let truncated: Vec<MatchEvent> = events
                .iter()
                .filter(|e| frame_index(e.period, e.second, h.period_durations) <= cut)
                .cloned()
                .collect();
            let mut th = h.clone();
            th.final_home_goals =
                truncated.iter().filter(|e| e.kind == EventKind::Goal && e.team_id == "h").count()
                    as u32;
            th.final_away_goals =
                truncated.iter().filter(|e| e.kind == EventKind::Goal && e.team_id == "a").count()
                    as u32;
            let part = build_frames(&th, &truncated, &RatingTable::default());
            for t in 1..=cut {
                assert_eq!(full.state(Side::Home, t), part.state(Side::Home, t), "t={t} cut={cut}");
                assert_eq!(full.state(Side::Away, t), part.state(Side::Away, t), "t={t} cut={cut}");
            }
        }
    }

    #[test]
    fn model_rows_shift_cumulative_features() {
        let mut h = header();
        h.final_home_goals = 1;
        let goal = event("h", 1, 2140, EventKind::Goal, true); // frame 40
        let m = build_frames(&h, &[goal], &RatingTable::default());
        let rows = model_rows(&m);
        let home_rows: Vec<&ModelRow> = rows.iter().filter(|r| r.side == Side::Home).collect();
        assert_eq!(home_rows.len(), NUM_FRAMES);
        // the scoring frame's row still sees the pre-goal score
        let r40 = home_rows[39];
        assert_eq!(r40.t, 40);
        assert_eq!(r40.features[1], 0.0);
        assert!(r40.scored);
        // the next frame's row sees the goal
        let r41 = home_rows[40];
        assert_eq!(r41.features[1], 1.0);
        assert_eq!(r41.features[2], 1.0);
        assert!(!r41.scored);
        // game_time is the frame being played
        assert!((r40.features[0] - 0.40).abs() < 1e-12);
    }

    #[test]
    fn extended_features_zero_and_single_pass() {
        let m = extended_features(&header(), &[]);
        let f1 = &m.home[0];
        assert_eq!(f1["shots"], 0.0);
        assert_eq!(f1["tempo"], 0.0);
        assert!(!f1.contains_key("tackle_success"));
        assert!(!f1.contains_key("possession"));
        assert!(!f1.contains_key("frames_since_goal"));

        // one successful attacking-third pass in frame 3 (seconds 109..162)
        let mut pass = event("h", 1, 150, EventKind::Pass, true);
        pass.x = 0.7;
        pass.end_x = Some(0.8);
        let m = extended_features(&header(), &[pass]);
        assert_eq!(m.home[1]["attacking_third_passes"], 0.0);
        for t in 3..=NUM_FRAMES {
            let f = &m.home[t - 1];
            assert_eq!(f["attacking_third_passes"], 1.0, "t={t}");
            assert_eq!(f["attacking_third_pass_success"], 1.0);
        }
        assert_eq!(m.home[2]["tempo"], 1.0);
        assert_eq!(m.home[3]["tempo"], 0.0);
        assert_eq!(m.home[2]["possession"], 1.0);
    }

    #[test]
    fn frames_csv_roundtrip() {
        let mut h = header();
        h.final_home_goals = 1;
        let goal = event("h", 1, 2140, EventKind::Goal, true);
        let m = build_frames(&h, &[goal], &RatingTable::default());
        let mut buf = Vec::new();
        write_frames_csv(&mut buf, std::slice::from_ref(&m)).unwrap();
        let read = read_frames_csv(buf.as_slice()).unwrap();
        assert_eq!(read.len(), 1);
        assert_eq!(read[0].home, m.home);
        assert_eq!(read[0].away, m.away);
        assert_eq!(read[0].outcome, m.outcome);
        assert_eq!(read[0].goal_frames, m.goal_frames);
    }
}
