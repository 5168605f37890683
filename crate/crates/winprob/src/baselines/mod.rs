//! Reference win-probability models: one multinomial logistic regression
//! over all frames (LR), one logistic regression per frame (mLR) and a
//! random forest (RF). All three predict the match outcome directly from
//! the home team's frame state.

mod forest;
mod linear;

pub use forest::{fit_forest, fit_rf, predict_rf, DecisionTree, ForestModel, RfConfig, RfModel, TreeNode};
pub use linear::{
    fit_lr, fit_mlr, predict_lr, predict_mlr, train_softmax, LinearConfig, LinearModel, LrModel,
    MlrModel,
};

use crate::features::{FrameMatrix, Side, FEATURE_NAMES};

/// Feature names for the per-frame models, which drop game time because
/// each frame gets its own classifier.
pub fn mlr_feature_names() -> Vec<&'static str> {
    FEATURE_NAMES.iter().copied().filter(|n| *n != "game_time").collect()
}

/// Flatten matrices into home-side training rows `(x, outcome)` at every
/// frame, in match then frame order.
pub(crate) fn home_rows(matrices: &[FrameMatrix]) -> (Vec<f64>, Vec<u8>) {
    let d = FEATURE_NAMES.len();
    let mut x = Vec::with_capacity(matrices.len() * 100 * d);
    let mut y = Vec::with_capacity(matrices.len() * 100);
    for m in matrices {
        for state in &m.home {
            x.extend_from_slice(&state.features());
            y.push(m.outcome.index() as u8);
        }
    }
    (x, y)
}

/// Count distinct outcome classes in a label vector.
pub(crate) fn distinct_classes(y: &[u8]) -> usize {
    let mut seen = [false; 3];
    for &v in y {
        seen[v as usize] = true;
    }
    seen.iter().filter(|&&s| s).count()
}

/// Home-side state sequence accessor shared by the fit functions.
pub(crate) fn home_state<'a>(
    m: &'a FrameMatrix,
    t: u8,
) -> &'a crate::features::FrameState {
    m.state(Side::Home, t)
}
