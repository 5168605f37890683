//! Event-stream data model and line-delimited JSON parsing.
//!
//! An event file is UTF-8 with one JSON object per line. A match starts
//! with an optional header line (`{"header": true, ...}`) naming home and
//! away sides and the per-period durations; the remaining lines are
//! on-pitch events. Pitch coordinates are team-relative: `x` always runs
//! toward the opponent's goal, so no flipping logic is needed downstream.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seconds of one regulation half.
pub const REGULATION_HALF_SECS: u32 = 2700;

/// Collapsed event taxonomy; provider-specific types map to `Other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Pass,
    Shot,
    Duel,
    Foul,
    YellowCard,
    RedCard,
    Goal,
    Other,
}

/// One annotated on-pitch event.
///
/// Own goals are credited to the team that benefits, with `player` absent;
/// score bookkeeping only needs team attribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchEvent {
    pub match_id: String,
    /// Half of the match, 1 or 2.
    pub period: u8,
    /// Elapsed seconds within the period.
    pub second: u32,
    #[serde(rename = "team")]
    pub team_id: String,
    #[serde(rename = "player", default, skip_serializing_if = "Option::is_none")]
    pub player_id: Option<String>,
    pub kind: EventKind,
    /// Pitch length fraction in [0, 1] toward the opponent goal.
    pub x: f64,
    /// Pitch width fraction in [0, 1].
    pub y: f64,
    #[serde(default = "default_success")]
    pub success: bool,
    /// End location of a pass along the pitch length, when annotated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_x: Option<f64>,
}

fn default_success() -> bool {
    true
}

/// Per-match metadata, synthesized from the stream when no header line is
/// present (first-seen team becomes the home side).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchHeader {
    pub match_id: String,
    pub home_team_id: String,
    pub away_team_id: String,
    pub final_home_goals: u32,
    pub final_away_goals: u32,
    /// Seconds per period including stoppage; at least 2700 each.
    pub period_durations: [u32; 2],
}

/// Raw header line as it appears in the file.
#[derive(Debug, Deserialize, Serialize)]
struct HeaderLine {
    header: bool,
    match_id: String,
    home: String,
    away: String,
    period_durations: [u32; 2],
}

/// A successful forward pass ending in the final third of the pitch.
///
/// Returns false when `end_x` is missing rather than erroring: passes
/// without an annotated end location simply do not qualify.
pub fn attacking_pass(e: &MatchEvent) -> bool {
    if e.kind != EventKind::Pass || !e.success {
        return false;
    }
    match e.end_x {
        Some(end_x) => end_x > 2.0 / 3.0 && end_x > e.x,
        None => false,
    }
}

/// Parse an event file into per-match headers and sorted event streams.
///
/// Matches are returned in first-appearance order. Events within a match
/// are sorted by (period, second), preserving file order within a second.
pub fn parse_events(path: &Path) -> Result<Vec<(MatchHeader, Vec<MatchEvent>)>> {
    let file = std::fs::File::open(path)?;
    parse_events_reader(BufReader::new(file))
}

/// Same as [`parse_events`] but over any buffered reader.
pub fn parse_events_reader<R: BufRead>(reader: R) -> Result<Vec<(MatchHeader, Vec<MatchEvent>)>> {
    struct PartialMatch {
        order: usize,
        header: Option<HeaderLine>,
        events: Vec<MatchEvent>,
        // (period, second) of the previous event line, for the
        // never-decreasing-clock invariant.
        last_clock: Option<(u8, u32)>,
    }

    let mut matches: BTreeMap<String, PartialMatch> = BTreeMap::new();
    let mut order = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;

        let is_header = value.get("header").and_then(|v| v.as_bool()).unwrap_or(false);
        if is_header {
            let header: HeaderLine =
                serde_json::from_value(value).map_err(|e| Error::Parse {
                    line: line_no,
                    msg: format!("bad header line: {e}"),
                })?;
            let entry = matches.entry(header.match_id.clone()).or_insert_with(|| {
                order += 1;
                PartialMatch { order, header: None, events: Vec::new(), last_clock: None }
            });
            entry.header = Some(header);
        } else {
            let event: MatchEvent = serde_json::from_value(value).map_err(|e| Error::Parse {
                line: line_no,
                msg: e.to_string(),
            })?;
            if !(1..=2).contains(&event.period) {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("period must be 1 or 2, got {}", event.period),
                });
            }
            let entry = matches.entry(event.match_id.clone()).or_insert_with(|| {
                order += 1;
                PartialMatch { order, header: None, events: Vec::new(), last_clock: None }
            });
            let clock = (event.period, event.second);
            if let Some(last) = entry.last_clock {
                if clock < last {
                    return Err(Error::Validation {
                        match_id: event.match_id.clone(),
                        rule: format!(
                            "clock went backwards at line {line_no}: {:?} after {:?}",
                            clock, last
                        ),
                    });
                }
            }
            entry.last_clock = Some(clock);
            entry.events.push(event);
        }
    }

    let mut partials: Vec<(String, PartialMatch)> = matches.into_iter().collect();
    partials.sort_by_key(|(_, p)| p.order);

    let mut out = Vec::with_capacity(partials.len());
    for (match_id, partial) in partials {
        let mut events = partial.events;
        events.sort_by_key(|e| (e.period, e.second));
        let header = finish_header(&match_id, partial.header, &events)?;
        validate_match(&header, &events)?;
        out.push((header, events));
    }
    Ok(out)
}

/// Build the final header, synthesizing missing pieces from the stream.
fn finish_header(
    match_id: &str,
    line: Option<HeaderLine>,
    events: &[MatchEvent],
) -> Result<MatchHeader> {
    let (home, away, durations) = match line {
        Some(h) => (h.home, h.away, h.period_durations),
        None => {
            let home = events
                .first()
                .map(|e| e.team_id.clone())
                .ok_or_else(|| Error::Validation {
                    match_id: match_id.to_string(),
                    rule: "match has no header and no events".into(),
                })?;
            let away = events
                .iter()
                .map(|e| &e.team_id)
                .find(|t| **t != home)
                .cloned()
                .ok_or_else(|| Error::Validation {
                    match_id: match_id.to_string(),
                    rule: "only one team appears in the stream".into(),
                })?;
            let mut durations = [REGULATION_HALF_SECS; 2];
            for e in events {
                let d = &mut durations[(e.period - 1) as usize];
                *d = (*d).max(e.second);
            }
            (home, away, durations)
        }
    };

    let count_goals = |team: &str| {
        events
            .iter()
            .filter(|e| e.kind == EventKind::Goal && e.team_id == team)
            .count() as u32
    };

    let final_home_goals = count_goals(&home);
    let final_away_goals = count_goals(&away);
    Ok(MatchHeader {
        match_id: match_id.to_string(),
        home_team_id: home,
        away_team_id: away,
        final_home_goals,
        final_away_goals,
        period_durations: durations,
    })
}

fn validate_match(header: &MatchHeader, events: &[MatchEvent]) -> Result<()> {
    let fail = |rule: String| Error::Validation { match_id: header.match_id.clone(), rule };

    if header.home_team_id == header.away_team_id {
        return Err(fail("home and away teams are identical".into()));
    }
    for d in header.period_durations {
        if d < REGULATION_HALF_SECS {
            return Err(fail(format!(
                "period duration {d}s is below the {REGULATION_HALF_SECS}s regulation minimum"
            )));
        }
    }

    let unit = 0.0..=1.0;
    for e in events {
        if e.team_id != header.home_team_id && e.team_id != header.away_team_id {
            return Err(fail(format!("event team `{}` is not in the header", e.team_id)));
        }
        if !unit.contains(&e.x) || !unit.contains(&e.y) {
            return Err(fail(format!("coordinates ({}, {}) outside [0,1]", e.x, e.y)));
        }
        if let Some(end_x) = e.end_x {
            if !unit.contains(&end_x) {
                return Err(fail(format!("end_x {end_x} outside [0,1]")));
            }
        }
    }

    let teams: std::collections::BTreeSet<&str> =
        events.iter().map(|e| e.team_id.as_str()).collect();
    if !events.is_empty() && teams.len() > 2 {
        return Err(fail(format!("{} distinct teams in the stream", teams.len())));
    }

    Ok(())
}

/// Serialize matches back to the line-delimited format read by
/// [`parse_events`]. Round-trips exactly.
pub fn write_events<W: Write>(
    mut w: W,
    matches: &[(MatchHeader, Vec<MatchEvent>)],
) -> Result<()> {
    for (header, events) in matches {
        let line = HeaderLine {
            header: true,
            match_id: header.match_id.clone(),
            home: header.home_team_id.clone(),
            away: header.away_team_id.clone(),
            period_durations: header.period_durations,
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
        for event in events {
            serde_json::to_writer(&mut w, event)?;
            w.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Convenience wrapper writing to a file path.
pub fn write_events_file(path: &Path, matches: &[(MatchHeader, Vec<MatchEvent>)]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_events(std::io::BufWriter::new(file), matches)
}
