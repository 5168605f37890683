//! Forecast-quality evaluation: ranked probability score, per-frame
//! accuracy and probability calibration.

use serde::{Deserialize, Serialize};

use crate::features::NUM_FRAMES;
use crate::outcome::{Outcome, OutcomeProbs};

/// Calibration bins with fewer samples than this are flagged
/// low-confidence.
pub const MIN_BIN_COUNT: usize = 50;

/// Default number of equal-width calibration bins.
pub const DEFAULT_BINS: usize = 10;

/// Ranked probability score of one forecast against the realized outcome.
///
/// With class order (win, tie, loss) and the cumulative outcome encodings
/// `[1,1,1]` / `[0,1,1]` / `[0,0,1]`:
///
/// ```text
/// rps = 1/2 * sum_{i=1..2} (cum_p_i - e_i)^2
/// ```
///
/// Zero for a perfect forecast; at most one. The metric rewards putting
/// mass near the true outcome in the win > tie > loss ordering.
pub fn rps(probs: &OutcomeProbs, outcome: Outcome) -> f64 {
    let e = match outcome {
        Outcome::Win => [1.0, 1.0],
        Outcome::Tie => [0.0, 1.0],
        Outcome::Loss => [0.0, 0.0],
    };
    let cum1 = probs.win;
    let cum2 = probs.win + probs.tie;
    0.5 * ((cum1 - e[0]).powi(2) + (cum2 - e[1]).powi(2))
}

/// One match's predictions: 100 per-frame probability triples plus the
/// final outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchPrediction {
    pub match_id: String,
    pub probs: Vec<OutcomeProbs>,
    pub outcome: Outcome,
}

/// One calibration bin for a single outcome class.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CalibrationBin {
    /// Center of the equal-width predicted-probability bin.
    pub bin_center: f64,
    /// Mean predicted probability of forecasts in the bin.
    pub predicted_mean: f64,
    /// Fraction of those forecasts whose match ended in this class.
    pub empirical: f64,
    pub count: usize,
    /// Set when `count < MIN_BIN_COUNT`.
    pub low_confidence: bool,
}

/// Calibration table for one outcome class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationTable {
    pub class: Outcome,
    pub bins: Vec<CalibrationBin>,
}

impl CalibrationTable {
    /// Largest |predicted - empirical| over bins meeting the count floor.
    pub fn max_deviation(&self, min_count: usize) -> f64 {
        self.bins
            .iter()
            .filter(|b| b.count >= min_count)
            .map(|b| (b.predicted_mean - b.empirical).abs())
            .fold(0.0, f64::max)
    }
}

/// Aggregated forecast-quality report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    /// Mean RPS per frame, 100 values.
    pub rps_by_frame: Vec<f64>,
    /// Argmax accuracy per frame, 100 values.
    pub accuracy_by_frame: Vec<f64>,
    /// Calibration tables in (win, tie, loss) order.
    pub calibration: Vec<CalibrationTable>,
    pub matches_evaluated: usize,
    pub mean_rps: f64,
}

impl EvalReport {
    pub fn calibration_for(&self, class: Outcome) -> &CalibrationTable {
        &self.calibration[class.index()]
    }
}

/// Per-frame fraction of matches whose most likely predicted outcome is
/// the realized one. Argmax ties break in win > tie > loss order.
pub fn accuracy_curve(predictions: &[MatchPrediction]) -> Vec<f64> {
    let mut correct = vec![0usize; NUM_FRAMES];
    for p in predictions {
        for (t, probs) in p.probs.iter().enumerate() {
            if probs.argmax() == p.outcome {
                correct[t] += 1;
            }
        }
    }
    let n = predictions.len().max(1) as f64;
    correct.into_iter().map(|c| c as f64 / n).collect()
}

/// Mean RPS per frame.
pub fn rps_curve(predictions: &[MatchPrediction]) -> Vec<f64> {
    let mut total = vec![0.0f64; NUM_FRAMES];
    for p in predictions {
        for (t, probs) in p.probs.iter().enumerate() {
            total[t] += rps(probs, p.outcome);
        }
    }
    let n = predictions.len().max(1) as f64;
    total.into_iter().map(|s| s / n).collect()
}

/// Calibration tables over a frame range (1-based, inclusive), pooling
/// every (match, frame) forecast in range.
pub fn calibration_curve_frames(
    predictions: &[MatchPrediction],
    bins: usize,
    frame_range: (u8, u8),
) -> Vec<CalibrationTable> {
    let bins = bins.max(2);
    let (lo, hi) = frame_range;
    let mut tables = Vec::with_capacity(3);
    for class_idx in 0..3 {
        let class = Outcome::from_index(class_idx);
        let mut sum_pred = vec![0.0f64; bins];
        let mut hits = vec![0usize; bins];
        let mut counts = vec![0usize; bins];
        for p in predictions {
            for t in lo..=hi {
                let probs = &p.probs[(t - 1) as usize];
                let pc = probs.get(class).clamp(0.0, 1.0);
                let b = ((pc * bins as f64) as usize).min(bins - 1);
                sum_pred[b] += pc;
                counts[b] += 1;
                if p.outcome == class {
                    hits[b] += 1;
                }
            }
        }
        let table = (0..bins)
            .filter(|&b| counts[b] > 0)
            .map(|b| CalibrationBin {
                bin_center: (b as f64 + 0.5) / bins as f64,
                predicted_mean: sum_pred[b] / counts[b] as f64,
                empirical: hits[b] as f64 / counts[b] as f64,
                count: counts[b],
                low_confidence: counts[b] < MIN_BIN_COUNT,
            })
            .collect();
        tables.push(CalibrationTable { class, bins: table });
    }
    tables
}

/// Calibration tables pooling all 100 frames.
pub fn calibration_curve(predictions: &[MatchPrediction], bins: usize) -> Vec<CalibrationTable> {
    calibration_curve_frames(predictions, bins, (1, NUM_FRAMES as u8))
}

/// Full report over a prediction set.
pub fn evaluate(predictions: &[MatchPrediction], bins: usize) -> EvalReport {
    let rps_by_frame = rps_curve(predictions);
    let mean_rps = rps_by_frame.iter().sum::<f64>() / rps_by_frame.len().max(1) as f64;
    EvalReport {
        accuracy_by_frame: accuracy_curve(predictions),
        calibration: calibration_curve(predictions, bins),
        matches_evaluated: predictions.len(),
        rps_by_frame,
        mean_rps,
    }
}
