//! Multinomial softmax regression, trained by full-batch gradient descent
//! with L2 regularization, plus the per-frame variant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FrameMatrix, FrameState, Standardization, FEATURE_NAMES, NUM_FRAMES};
use crate::outcome::OutcomeProbs;

use super::{distinct_classes, home_rows, home_state, mlr_feature_names};

const CLASSES: usize = 3;
/// Iterations without improvement before the step size is halved.
const PATIENCE: usize = 10;
/// Window for the objective-plateau convergence check.
const PLATEAU_WINDOW: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearConfig {
    /// L2 penalty on weights (intercepts are unpenalized).
    pub l2: f64,
    /// Initial gradient-descent step.
    pub step: f64,
    pub max_iterations: usize,
    /// Converged when the max-norm of the mean gradient drops below this.
    pub grad_tol: f64,
    /// Converged when the relative objective improvement over the last 50
    /// iterations drops below this.
    pub plateau_tol: f64,
    /// When set, prediction errors on inputs more than 10 standard
    /// deviations from the training mean, catching unstandardized data.
    pub range_check: bool,
}

impl Default for LinearConfig {
    fn default() -> Self {
        // the L2 tail makes gradient norms decay like exp(-step*l2*iter),
        // so the default tolerance has to be reachable within the
        // iteration budget
        Self {
            l2: 1e-4,
            step: 0.5,
            max_iterations: 10_000,
            grad_tol: 1e-3,
            plateau_tol: 1e-8,
            range_check: false,
        }
    }
}

/// Per-class weight vectors and intercepts in (win, tie, loss) order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub feature_names: Vec<String>,
    /// `weights[class][feature]`.
    pub weights: Vec<Vec<f64>>,
    pub intercepts: Vec<f64>,
}

impl LinearModel {
    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Softmax probabilities for a standardized feature vector.
    pub fn predict_z(&self, z: &[f64]) -> OutcomeProbs {
        debug_assert_eq!(z.len(), self.num_features());
        let mut logits = [0.0f64; CLASSES];
        for c in 0..CLASSES {
            let mut v = self.intercepts[c];
            for (j, &x) in z.iter().enumerate() {
                v += self.weights[c][j] * x;
            }
            logits[c] = v;
        }
        softmax(&logits)
    }
}

fn softmax(logits: &[f64; CLASSES]) -> OutcomeProbs {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    OutcomeProbs { win: exps[0] / sum, tie: exps[1] / sum, loss: exps[2] / sum }
}

/// LR model: one multinomial regression over all frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrModel {
    pub linear: LinearModel,
    pub standardization: Standardization,
    pub range_check: bool,
}

/// mLR model: one multinomial regression per frame, game time removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlrModel {
    /// 100 models indexed by frame - 1.
    pub models: Vec<LinearModel>,
    pub standardization: Standardization,
    pub range_check: bool,
}

/// Train a softmax classifier on raw rows.
///
/// `x` is row-major with `d` features per row; labels are class indices.
/// Gradient descent runs with a fixed step that halves after 10
/// non-improving iterations; non-convergence within the iteration budget
/// is an error carrying the final gradient norm.
pub fn train_softmax(
    x: &[f64],
    y: &[u8],
    d: usize,
    feature_names: &[&str],
    config: &LinearConfig,
) -> Result<LinearModel> {
    let n = y.len();
    if n == 0 {
        return Err(Error::Range("empty training set".into()));
    }
    if distinct_classes(y) < 2 {
        return Err(Error::Range("need at least 2 outcome classes in training data".into()));
    }
    debug_assert_eq!(x.len(), n * d);

    let mut weights = vec![vec![0.0f64; d]; CLASSES];
    let mut intercepts = vec![0.0f64; CLASSES];
    let inv_n = 1.0 / n as f64;

    let mut step = config.step;
    let mut best_obj = f64::INFINITY;
    let mut since_best = 0usize;
    let mut history: Vec<f64> = Vec::with_capacity(config.max_iterations);
    let mut grad_norm = f64::INFINITY;

    let mut grad_w = vec![vec![0.0f64; d]; CLASSES];
    let mut grad_b = vec![0.0f64; CLASSES];

    for iter in 0..config.max_iterations {
        for g in grad_w.iter_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        grad_b.iter_mut().for_each(|v| *v = 0.0);

        // mean negative log-likelihood and its gradient
        let mut nll = 0.0;
        for i in 0..n {
            let xi = &x[i * d..(i + 1) * d];
            let mut logits = [0.0f64; CLASSES];
            for c in 0..CLASSES {
                let mut v = intercepts[c];
                for j in 0..d {
                    v += weights[c][j] * xi[j];
                }
                logits[c] = v;
            }
            let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut sum = 0.0;
            let mut exps = [0.0f64; CLASSES];
            for c in 0..CLASSES {
                exps[c] = (logits[c] - max).exp();
                sum += exps[c];
            }
            let label = y[i] as usize;
            nll -= logits[label] - max - sum.ln();
            for c in 0..CLASSES {
                let p = exps[c] / sum;
                let resid = p - if c == label { 1.0 } else { 0.0 };
                for j in 0..d {
                    grad_w[c][j] += resid * xi[j];
                }
                grad_b[c] += resid;
            }
        }

        let mut obj = nll * inv_n;
        grad_norm = 0.0f64;
        for c in 0..CLASSES {
            for j in 0..d {
                grad_w[c][j] = grad_w[c][j] * inv_n + config.l2 * weights[c][j];
                obj += 0.5 * config.l2 * weights[c][j] * weights[c][j];
                grad_norm = grad_norm.max(grad_w[c][j].abs());
            }
            grad_b[c] *= inv_n;
            grad_norm = grad_norm.max(grad_b[c].abs());
        }

        if !obj.is_finite() {
            return Err(Error::Numerical(format!("objective became non-finite at iter {iter}")));
        }
        history.push(obj);

        if grad_norm < config.grad_tol {
            return Ok(finish(feature_names, weights, intercepts));
        }
        if history.len() > PLATEAU_WINDOW {
            let prev = history[history.len() - 1 - PLATEAU_WINDOW];
            let rel = (prev - obj) / prev.abs().max(1e-12);
            if rel < config.plateau_tol {
                return Ok(finish(feature_names, weights, intercepts));
            }
        }

        if obj < best_obj - 1e-15 {
            best_obj = obj;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= PATIENCE {
                step *= 0.5;
                since_best = 0;
            }
        }

        for c in 0..CLASSES {
            for j in 0..d {
                weights[c][j] -= step * grad_w[c][j];
            }
            intercepts[c] -= step * grad_b[c];
        }
    }

    Err(Error::NoConvergence { iterations: config.max_iterations, grad_norm })
}

fn finish(feature_names: &[&str], weights: Vec<Vec<f64>>, intercepts: Vec<f64>) -> LinearModel {
    LinearModel {
        feature_names: feature_names.iter().map(|s| s.to_string()).collect(),
        weights,
        intercepts,
    }
}

/// Fit the single multinomial model on all home-side frame states.
pub fn fit_lr(matrices: &[FrameMatrix], config: &LinearConfig) -> Result<LrModel> {
    let (raw, y) = home_rows(matrices);
    let d = FEATURE_NAMES.len();
    let standardization = Standardization::fit(&FEATURE_NAMES, raw.chunks_exact(d));
    let mut x = raw;
    for row in x.chunks_exact_mut(d) {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (*v - standardization.means[j]) / standardization.sds[j];
        }
    }
    let linear = train_softmax(&x, &y, d, &FEATURE_NAMES, config)?;
    Ok(LrModel { linear, standardization, range_check: config.range_check })
}

/// Fit one multinomial model per frame on that frame's home states, with
/// game time removed from the feature vector.
pub fn fit_mlr(matrices: &[FrameMatrix], config: &LinearConfig) -> Result<MlrModel> {
    let names = mlr_feature_names();
    let d = names.len();

    // shared standardization across frames keeps the models comparable
    let mut raw = Vec::with_capacity(matrices.len() * NUM_FRAMES * d);
    for m in matrices {
        for state in &m.home {
            let feats = state.features();
            raw.extend(FEATURE_NAMES.iter().zip(feats.iter()).filter_map(|(n, v)| {
                if *n == "game_time" {
                    None
                } else {
                    Some(*v)
                }
            }));
        }
    }
    let standardization = Standardization::fit(&names, raw.chunks_exact(d));

    use rayon::prelude::*;
    let models: Vec<LinearModel> = (1..=NUM_FRAMES as u8)
        .into_par_iter()
        .map(|t| {
            let mut x = Vec::with_capacity(matrices.len() * d);
            let mut y = Vec::with_capacity(matrices.len());
            for m in matrices {
                let feats = home_state(m, t).features();
                for (n, v) in FEATURE_NAMES.iter().zip(feats.iter()) {
                    if *n != "game_time" {
                        x.push(*v);
                    }
                }
                y.push(m.outcome.index() as u8);
            }
            if y.is_empty() {
                return Err(Error::Range(format!("no training examples for frame {t}")));
            }
            for row in x.chunks_exact_mut(d) {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = (*v - standardization.means[j]) / standardization.sds[j];
                }
            }
            train_softmax(&x, &y, d, &names, config).map_err(|e| match e {
                Error::Range(msg) => Error::Range(format!("frame {t}: {msg}")),
                other => other,
            })
        })
        .collect::<Result<_>>()?;
    Ok(MlrModel { models, standardization, range_check: config.range_check })
}

fn standardize_checked(
    standardization: &Standardization,
    raw: &[f64],
    range_check: bool,
) -> Result<Vec<f64>> {
    let z = standardization.apply_vec(raw);
    if range_check {
        if let Some((j, v)) = z.iter().enumerate().find(|(_, v)| v.abs() > 10.0) {
            return Err(Error::Range(format!(
                "feature `{}` is {v:.1} training sds from the mean; input may not be in raw units",
                standardization.names[j]
            )));
        }
    }
    Ok(z)
}

/// Predict with the all-frames model from a raw frame state.
pub fn predict_lr(model: &LrModel, state: &FrameState) -> Result<OutcomeProbs> {
    let z = standardize_checked(&model.standardization, &state.features(), model.range_check)?;
    Ok(model.linear.predict_z(&z))
}

/// Predict with the per-frame model, dispatching on `state.t`.
pub fn predict_mlr(model: &MlrModel, state: &FrameState) -> Result<OutcomeProbs> {
    if !(1..=NUM_FRAMES as u8).contains(&state.t) {
        return Err(Error::Range(format!("frame {} outside 1..=100", state.t)));
    }
    let feats = state.features();
    let raw: Vec<f64> = FEATURE_NAMES
        .iter()
        .zip(feats.iter())
        .filter_map(|(n, v)| if *n == "game_time" { None } else { Some(*v) })
        .collect();
    let z = standardize_checked(&model.standardization, &raw, model.range_check)?;
    Ok(model.models[(state.t - 1) as usize].predict_z(&z))
}
