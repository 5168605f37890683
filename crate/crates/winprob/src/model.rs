//! Versioned on-disk model files and a common prediction interface.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{predict_lr, predict_mlr, predict_rf, LrModel, MlrModel, RfModel};
use crate::bayes::{predict_match, PosteriorParams, PredictMode};
use crate::error::{Error, Result};
use crate::eval::MatchPrediction;
use crate::features::FrameMatrix;
use crate::outcome::OutcomeProbs;

pub const MODEL_FORMAT: &str = "winprob-model";
pub const MODEL_VERSION: u32 = 1;

/// Any of the four fitted model kinds.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "model", rename_all = "snake_case")]
pub enum ModelFile {
    Bayes(PosteriorParams),
    Lr(LrModel),
    Mlr(MlrModel),
    Rf(RfModel),
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: String,
    version: u32,
    #[serde(flatten)]
    model: ModelFile,
}

impl ModelFile {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelFile::Bayes(_) => "bayes",
            ModelFile::Lr(_) => "lr",
            ModelFile::Mlr(_) => "mlr",
            ModelFile::Rf(_) => "rf",
        }
    }

    pub fn save<W: Write>(&self, writer: W) -> Result<()> {
        let envelope = Envelope {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        serde_json::to_writer(writer, &envelope)?;
        Ok(())
    }

    pub fn save_file(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.save(std::io::BufWriter::new(file))
    }

    pub fn load<R: Read>(reader: R) -> Result<Self> {
        let envelope: Envelope = serde_json::from_reader(reader)?;
        if envelope.format != MODEL_FORMAT {
            return Err(Error::Validation {
                match_id: "-".into(),
                rule: format!("not a model file (format `{}`)", envelope.format),
            });
        }
        if envelope.version != MODEL_VERSION {
            return Err(Error::Validation {
                match_id: "-".into(),
                rule: format!(
                    "unsupported model version {} (expected {MODEL_VERSION})",
                    envelope.version
                ),
            });
        }
        if let ModelFile::Bayes(params) = &envelope.model {
            params.validate()?;
        }
        Ok(envelope.model)
    }

    pub fn load_file(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::load(std::io::BufReader::new(file))
    }

    /// Per-frame outcome probabilities for one match.
    pub fn predict_matrix(&self, matrix: &FrameMatrix) -> Result<Vec<OutcomeProbs>> {
        match self {
            ModelFile::Bayes(params) => predict_match(matrix, params, PredictMode::Mean),
            ModelFile::Lr(model) => {
                matrix.home.iter().map(|state| predict_lr(model, state)).collect()
            }
            ModelFile::Mlr(model) => {
                matrix.home.iter().map(|state| predict_mlr(model, state)).collect()
            }
            ModelFile::Rf(model) => {
                Ok(matrix.home.iter().map(|state| predict_rf(model, state)).collect())
            }
        }
    }

    /// Predictions for a whole corpus, parallel over matches.
    pub fn predict_matrices(&self, matrices: &[FrameMatrix]) -> Result<Vec<MatchPrediction>> {
        matrices
            .par_iter()
            .map(|m| {
                Ok(MatchPrediction {
                    match_id: m.match_id.clone(),
                    probs: self.predict_matrix(m)?,
                    outcome: m.outcome,
                })
            })
            .collect()
    }
}
