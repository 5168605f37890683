// temporary tuning harness; removed once constants are frozen
use winprob::baselines::{fit_lr, fit_mlr, LinearConfig};
use winprob::bayes::{fit_vi, FeatureSet, FitSchedule, PriorConfig};
use winprob::eval::{calibration_curve_frames, evaluate, MIN_BIN_COUNT};
use winprob::model::ModelFile;
use winprob::outcome::Outcome;
use winprob::simgen::{simulate_corpus, GeneratorConfig};

fn main() {
    let walk: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let train_size: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(600);
    let train_seed: u64 = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(11);
    let test_seed: u64 = std::env::args().nth(4).and_then(|s| s.parse().ok()).unwrap_or(12);
    println!("walk {walk} train {train_size} seeds {train_seed}/{test_seed}");

    let train = simulate_corpus(&GeneratorConfig::varying_context(train_size, train_seed)).unwrap();
    let test = simulate_corpus(&GeneratorConfig::varying_context(5000, test_seed)).unwrap();

    let schedule = FitSchedule { iterations: 32000, tol: 0.0, seed: 5, ..FitSchedule::default() };
    let prior = PriorConfig { alpha_walk_scale: walk, ..PriorConfig::default() };
    let bayes =
        ModelFile::Bayes(fit_vi(&train.matrices, &prior, &schedule, FeatureSet::Full).unwrap());
    let lr = ModelFile::Lr(fit_lr(&train.matrices, &LinearConfig::default()).unwrap());
    let mlr = ModelFile::Mlr(fit_mlr(&train.matrices, &LinearConfig::default()).unwrap());

    // posterior-mode bayes predictions
    {
        use rayon::prelude::*;
        use winprob::bayes::{predict_match, PredictMode};
        let ModelFile::Bayes(params) = &bayes else { unreachable!() };
        let preds: Vec<winprob::eval::MatchPrediction> = test
            .matrices
            .par_iter()
            .map(|m| winprob::eval::MatchPrediction {
                match_id: m.match_id.clone(),
                probs: predict_match(m, params, PredictMode::Posterior { samples: 32, seed: 9 })
                    .unwrap(),
                outcome: m.outcome,
            })
            .collect();
        let report = evaluate(&preds, 10);
        let late_tables = calibration_curve_frames(&preds, 10, (90, 100));
        let tie_dev = late_tables[Outcome::Tie.index()].max_deviation(MIN_BIN_COUNT);
        println!(
            "  bayes-post: mean_rps {:.5} late_tie_maxdev {:.4}",
            report.mean_rps, tie_dev
        );
    }

    for (name, model) in [("bayes", &bayes), ("lr", &lr), ("mlr", &mlr)] {
        let preds = model.predict_matrices(&test.matrices).unwrap();
        let report = evaluate(&preds, 10);
        let early: f64 = report.accuracy_by_frame[..20].iter().sum::<f64>() / 20.0;
        let late: f64 = report.accuracy_by_frame[80..].iter().sum::<f64>() / 20.0;
        let late_tables = calibration_curve_frames(&preds, 10, (90, 100));
        let tie_dev = late_tables[Outcome::Tie.index()].max_deviation(MIN_BIN_COUNT);
        println!(
            "  {name}: mean_rps {:.5} acc_early {:.3} acc_late {:.3} late_tie_maxdev {:.4}",
            report.mean_rps, early, late, tie_dev
        );
    }
}
