//! Stochastic variational inference for the future-goals model.
//!
//! The variational family is a fully factorized Gaussian over every
//! coefficient `alpha[t][f]`, the intercept `beta` and the home advantage
//! `ha`, parameterized by mean and log standard deviation. The ELBO's
//! likelihood term is estimated with reparameterized samples
//! (`value = mean + exp(log_sd) * noise`) on minibatches rescaled to the
//! full dataset; the Gaussian prior and entropy terms are exact.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{model_rows, FrameMatrix, Standardization, NUM_FRAMES};

use super::{logit, FeatureSet, PosteriorParams, PriorConfig};

const LN_2PI: f64 = 1.8378770664093453;
/// Reparameterization draws per optimisation step.
const FIT_NOISE_DRAWS: usize = 1;
/// Draws for the final reported ELBO estimate.
const REPORT_NOISE_DRAWS: usize = 16;
/// Iterations between convergence checks, and the window the relative
/// ELBO improvement is measured over.
const CHECK_EVERY: usize = 50;
/// Rows in the fixed evaluation subset used for convergence checks.
const EVAL_ROWS: usize = 32_768;

/// Optimisation schedule for [`fit_vi`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSchedule {
    /// Base step size, decayed by `1/sqrt(1 + iter/1000)`.
    pub step: f64,
    /// Maximum iterations.
    pub iterations: usize,
    /// Frame-observations per minibatch.
    pub minibatch: usize,
    pub seed: u64,
    /// Relative ELBO improvement between convergence checks below which
    /// fitting stops early. Zero or negative disables early stopping.
    pub tol: f64,
}

impl Default for FitSchedule {
    fn default() -> Self {
        Self { step: 0.02, iterations: 20_000, minibatch: 4096, seed: 0, tol: 1e-4 }
    }
}

/// Flattened mean-field parameters: `100 * F` coefficients plus intercept
/// and home advantage, in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct VarParams {
    pub mean: Vec<f64>,
    pub log_sd: Vec<f64>,
    pub num_features: usize,
}

impl VarParams {
    pub fn new(num_features: usize) -> Self {
        let dim = NUM_FRAMES * num_features + 2;
        Self { mean: vec![0.0; dim], log_sd: vec![0.0; dim], num_features }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn alpha_index(&self, t: usize, f: usize) -> usize {
        debug_assert!(t < NUM_FRAMES && f < self.num_features);
        t * self.num_features + f
    }

    pub fn beta_index(&self) -> usize {
        self.dim() - 2
    }

    pub fn ha_index(&self) -> usize {
        self.dim() - 1
    }
}

/// Gradient of the ELBO with respect to all variational parameters.
#[derive(Debug, Clone)]
pub struct VarGrad {
    pub mean: Vec<f64>,
    pub log_sd: Vec<f64>,
}

impl VarGrad {
    fn zeros(dim: usize) -> Self {
        Self { mean: vec![0.0; dim], log_sd: vec![0.0; dim] }
    }
}

/// Standardized per-frame goal observations for a training set.
#[derive(Debug, Clone)]
pub struct Observations {
    pub num_features: usize,
    pub standardization: Standardization,
    /// Row-major standardized features, `rows * num_features`.
    pub x: Vec<f64>,
    /// Frame index per row, 1..=100.
    pub t: Vec<u8>,
    pub home: Vec<bool>,
    pub scored: Vec<bool>,
}

impl Observations {
    pub fn rows(&self) -> usize {
        self.t.len()
    }
}

/// Expand matrices into standardized per-frame observations.
pub fn build_observations(matrices: &[FrameMatrix], feature_set: FeatureSet) -> Observations {
    let names = feature_set.names();
    let proj: Vec<usize> = names
        .iter()
        .map(|n| {
            crate::features::FEATURE_NAMES
                .iter()
                .position(|f| f == n)
                .expect("feature set names are canonical")
        })
        .collect();
    let f = names.len();

    let mut raw = Vec::with_capacity(matrices.len() * 2 * NUM_FRAMES * f);
    let mut t = Vec::new();
    let mut home = Vec::new();
    let mut scored = Vec::new();
    for m in matrices {
        for row in model_rows(m) {
            for &src in &proj {
                raw.push(row.features[src]);
            }
            t.push(row.t);
            home.push(row.side == crate::features::Side::Home);
            scored.push(row.scored);
        }
    }

    let standardization = Standardization::fit(&names, raw.chunks_exact(f.max(1)));
    let mut x = raw;
    for row in x.chunks_exact_mut(f.max(1)) {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (*v - standardization.means[j]) / standardization.sds[j];
        }
    }

    Observations { num_features: f, standardization, x, t, home, scored }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Draw standard-normal noise vectors matching the parameter layout.
pub fn sample_noise<R: Rng>(rng: &mut R, draws: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..draws)
        .map(|_| (0..dim).map(|_| StandardNormal.sample(rng)).collect())
        .collect()
}

/// Unbiased ELBO estimate and its exact gradient for one minibatch.
///
/// The likelihood term is rescaled by `total_count / batch.len()`; the
/// random-walk prior, the scalar priors and the Gaussian entropy enter in
/// closed form. Gradients flow through the samples by reparameterization.
pub fn elbo_and_grad(
    params: &VarParams,
    prior: &PriorConfig,
    obs: &Observations,
    batch: &[usize],
    noise: &[Vec<f64>],
    total_count: usize,
) -> Result<(f64, VarGrad)> {
    if batch.is_empty() {
        return Err(Error::Range("empty minibatch".into()));
    }
    if noise.is_empty() {
        return Err(Error::Range("at least one noise draw is required".into()));
    }
    let dim = params.dim();
    let f = params.num_features;
    let scale = total_count as f64 / batch.len() as f64;
    let sds: Vec<f64> = params.log_sd.iter().map(|v| v.exp()).collect();

    let mut grad = VarGrad::zeros(dim);
    let mut lik_total = 0.0;
    let draw_weight = scale / noise.len() as f64;

    let mut sampled = vec![0.0f64; dim];
    let mut dlik = vec![0.0f64; dim];
    for eps in noise {
        debug_assert_eq!(eps.len(), dim);
        for i in 0..dim {
            sampled[i] = params.mean[i] + sds[i] * eps[i];
        }
        dlik.iter_mut().for_each(|v| *v = 0.0);
        let beta = sampled[dim - 2];
        let ha = sampled[dim - 1];
        let mut lik = 0.0;

        for &ri in batch {
            let xs = &obs.x[ri * f..ri * f + f];
            let base = (obs.t[ri] as usize - 1) * f;
            let mut eta = beta;
            if obs.home[ri] {
                eta += ha;
            }
            for j in 0..f {
                eta += sampled[base + j] * xs[j];
            }
            let y = if obs.scored[ri] { 1.0 } else { 0.0 };
            lik += y * eta - softplus(eta);
            let resid = y - sigmoid(eta);
            for j in 0..f {
                dlik[base + j] += resid * xs[j];
            }
            dlik[dim - 2] += resid;
            if obs.home[ri] {
                dlik[dim - 1] += resid;
            }
        }

        lik_total += lik * draw_weight;
        for i in 0..dim {
            grad.mean[i] += draw_weight * dlik[i];
            grad.log_sd[i] += draw_weight * dlik[i] * eps[i] * sds[i];
        }
    }

    // E_q[log p]: random-walk chains per feature, then the scalar priors.
    let mut prior_term = 0.0;
    let aw2 = prior.alpha_walk_scale * prior.alpha_walk_scale;
    let a12 = prior.alpha1_scale * prior.alpha1_scale;
    for fi in 0..f {
        let i0 = fi;
        prior_term += -0.5 * LN_2PI
            - prior.alpha1_scale.ln()
            - (params.mean[i0] * params.mean[i0] + sds[i0] * sds[i0]) / (2.0 * a12);
        grad.mean[i0] -= params.mean[i0] / a12;
        grad.log_sd[i0] -= sds[i0] * sds[i0] / a12;
        for t in 1..NUM_FRAMES {
            let i = t * f + fi;
            let p = (t - 1) * f + fi;
            let dm = params.mean[i] - params.mean[p];
            prior_term += -0.5 * LN_2PI
                - prior.alpha_walk_scale.ln()
                - (dm * dm + sds[i] * sds[i] + sds[p] * sds[p]) / (2.0 * aw2);
            grad.mean[i] -= dm / aw2;
            grad.mean[p] += dm / aw2;
            grad.log_sd[i] -= sds[i] * sds[i] / aw2;
            grad.log_sd[p] -= sds[p] * sds[p] / aw2;
        }
    }
    for (idx, scale_p) in [(dim - 2, prior.beta_scale), (dim - 1, prior.ha_scale)] {
        let s2 = scale_p * scale_p;
        prior_term += -0.5 * LN_2PI
            - scale_p.ln()
            - (params.mean[idx] * params.mean[idx] + sds[idx] * sds[idx]) / (2.0 * s2);
        grad.mean[idx] -= params.mean[idx] / s2;
        grad.log_sd[idx] -= sds[idx] * sds[idx] / s2;
    }

    // Gaussian entropy: 0.5 ln(2 pi e) + log_sd per coordinate.
    let mut entropy = 0.0;
    for i in 0..dim {
        entropy += 0.5 * (LN_2PI + 1.0) + params.log_sd[i];
        grad.log_sd[i] += 1.0;
    }

    let elbo = lik_total + prior_term + entropy;
    if !elbo.is_finite() {
        let block = if !lik_total.is_finite() {
            "likelihood"
        } else if !prior_term.is_finite() {
            "prior"
        } else {
            "entropy"
        };
        return Err(Error::Numerical(format!("non-finite ELBO ({block} term)")));
    }
    Ok((elbo, grad))
}

/// Serves shuffled epochs of row indices as minibatches.
struct BatchSampler {
    indices: Vec<usize>,
    cursor: usize,
    batch: usize,
}

impl BatchSampler {
    fn new(rows: usize, batch: usize) -> Self {
        Self { indices: (0..rows).collect(), cursor: rows, batch: batch.min(rows).max(1) }
    }

    fn next_batch<R: Rng>(&mut self, rng: &mut R) -> Vec<usize> {
        if self.cursor + self.batch > self.indices.len() {
            self.indices.shuffle(rng);
            self.cursor = 0;
        }
        let batch = self.indices[self.cursor..self.cursor + self.batch].to_vec();
        self.cursor += self.batch;
        batch
    }
}

/// Fit the posterior by stochastic gradient ascent on the ELBO with Adam
/// preconditioning.
///
/// Convergence is checked every 50 iterations against a fixed evaluation
/// subset with common random numbers; fitting stops when the relative
/// ELBO improvement since the previous check drops below `schedule.tol`.
/// Deterministic given the seed.
pub fn fit_vi(
    matrices: &[FrameMatrix],
    prior: &PriorConfig,
    schedule: &FitSchedule,
    feature_set: FeatureSet,
) -> Result<PosteriorParams> {
    prior.validate()?;
    if matrices.is_empty() {
        return Err(Error::Range("training set is empty".into()));
    }
    let obs = build_observations(matrices, feature_set);
    fit_vi_observations(&obs, prior, schedule)
}

/// Fitting core, exposed for callers that already built observations.
pub fn fit_vi_observations(
    obs: &Observations,
    prior: &PriorConfig,
    schedule: &FitSchedule,
) -> Result<PosteriorParams> {
    prior.validate()?;
    let rows = obs.rows();
    if rows == 0 {
        return Err(Error::Range("training set has no observations".into()));
    }
    let f = obs.num_features;
    let mut params = VarParams::new(f);
    let dim = params.dim();

    // data-informed intercept start; everything else starts at zero with
    // a small initial sd to keep early gradients quiet
    let rate = obs.scored.iter().filter(|&&s| s).count() as f64 / rows as f64;
    let beta_idx = params.beta_index();
    params.mean[beta_idx] = logit(rate.clamp(1e-5, 1.0 - 1e-5));
    params.log_sd.fill((0.1f64).ln());

    let mut rng = ChaCha12Rng::seed_from_u64(schedule.seed);
    let mut sampler = BatchSampler::new(rows, schedule.minibatch);

    // fixed evaluation subset and noise for convergence checks
    let eval_batch: Vec<usize> = if rows <= EVAL_ROWS {
        (0..rows).collect()
    } else {
        rand::seq::index::sample(&mut rng, rows, EVAL_ROWS).into_vec()
    };
    let eval_noise = sample_noise(&mut rng, 1, dim);
    let mut last_eval: Option<f64> = None;

    // Adam state
    let (beta1, beta2, eps_adam): (f64, f64, f64) = (0.9, 0.999, 1e-8);
    let mut m = VarGrad::zeros(dim);
    let mut v = VarGrad::zeros(dim);

    // tail average of the iterates smooths the per-frame coefficient
    // traces out of the SGD noise floor
    let tail_start = schedule.iterations - schedule.iterations / 4;
    let mut tail = VarGrad::zeros(dim);
    let mut tail_count = 0usize;

    let mut trace = Vec::with_capacity(schedule.iterations + 1);

    for iter in 1..=schedule.iterations {
        let batch = sampler.next_batch(&mut rng);
        let noise = sample_noise(&mut rng, FIT_NOISE_DRAWS, dim);
        let (elbo, grad) =
            elbo_and_grad(&params, prior, obs, &batch, &noise, rows).map_err(|e| match e {
                Error::Numerical(msg) => Error::Numerical(format!(
                    "{msg} at iteration {iter}; try a smaller step size"
                )),
                other => other,
            })?;
        trace.push(elbo);

        let lr = schedule.step / (1.0 + iter as f64 / 1000.0).sqrt();
        let bc1 = 1.0 - beta1.powi(iter as i32);
        let bc2 = 1.0 - beta2.powi(iter as i32);
        for i in 0..dim {
            m.mean[i] = beta1 * m.mean[i] + (1.0 - beta1) * grad.mean[i];
            v.mean[i] = beta2 * v.mean[i] + (1.0 - beta2) * grad.mean[i] * grad.mean[i];
            params.mean[i] += lr * (m.mean[i] / bc1) / ((v.mean[i] / bc2).sqrt() + eps_adam);

            m.log_sd[i] = beta1 * m.log_sd[i] + (1.0 - beta1) * grad.log_sd[i];
            v.log_sd[i] = beta2 * v.log_sd[i] + (1.0 - beta2) * grad.log_sd[i] * grad.log_sd[i];
            params.log_sd[i] += lr * (m.log_sd[i] / bc1) / ((v.log_sd[i] / bc2).sqrt() + eps_adam);
        }

        if iter > tail_start {
            for i in 0..dim {
                tail.mean[i] += params.mean[i];
                tail.log_sd[i] += params.log_sd[i];
            }
            tail_count += 1;
        }

        if schedule.tol > 0.0 && iter >= 2 * CHECK_EVERY && iter % CHECK_EVERY == 0 {
            let (eval_elbo, _) =
                elbo_and_grad(&params, prior, obs, &eval_batch, &eval_noise, rows)?;
            let converged = match last_eval {
                Some(prev) => (eval_elbo - prev) / prev.abs().max(1.0) < schedule.tol,
                None => false,
            };
            last_eval = Some(eval_elbo);
            if converged {
                break;
            }
        }
    }

    if tail_count > 0 {
        for i in 0..dim {
            params.mean[i] = tail.mean[i] / tail_count as f64;
            params.log_sd[i] = tail.log_sd[i] / tail_count as f64;
        }
    }

    // final full-batch estimate with more draws
    let full_batch: Vec<usize> = (0..rows).collect();
    let report_noise = sample_noise(&mut rng, REPORT_NOISE_DRAWS, dim);
    let (final_elbo, _) = elbo_and_grad(&params, prior, obs, &full_batch, &report_noise, rows)?;
    trace.push(final_elbo);

    Ok(assemble_posterior(&params, obs, prior, schedule, trace))
}

fn assemble_posterior(
    params: &VarParams,
    obs: &Observations,
    prior: &PriorConfig,
    schedule: &FitSchedule,
    elbo_trace: Vec<f64>,
) -> PosteriorParams {
    let f = params.num_features;
    let mut alpha_mean = Vec::with_capacity(NUM_FRAMES);
    let mut alpha_log_sd = Vec::with_capacity(NUM_FRAMES);
    for t in 0..NUM_FRAMES {
        alpha_mean.push(params.mean[t * f..(t + 1) * f].to_vec());
        alpha_log_sd.push(params.log_sd[t * f..(t + 1) * f].to_vec());
    }
    PosteriorParams {
        feature_names: obs.standardization.names.clone(),
        alpha_mean,
        alpha_log_sd,
        beta_mean: params.mean[params.beta_index()],
        beta_log_sd: params.log_sd[params.beta_index()],
        ha_mean: params.mean[params.ha_index()],
        ha_log_sd: params.log_sd[params.ha_index()],
        standardization: obs.standardization.clone(),
        prior: *prior,
        schedule: *schedule,
        elbo_trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tiny_obs(rows: usize, f: usize, seed: u64) -> Observations {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let names: Vec<String> = (0..f).map(|i| format!("f{i}")).collect();
        Observations {
            num_features: f,
            standardization: Standardization {
                names,
                means: vec![0.0; f],
                sds: vec![1.0; f],
            },
            x: (0..rows * f).map(|_| rng.gen_range(-1.5..1.5)).collect(),
            t: (0..rows).map(|_| rng.gen_range(1..=NUM_FRAMES as u8)).collect(),
            home: (0..rows).map(|_| rng.gen_bool(0.5)).collect(),
            scored: (0..rows).map(|_| rng.gen_bool(0.1)).collect(),
        }
    }

    fn random_params(f: usize, seed: u64) -> VarParams {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut p = VarParams::new(f);
        for i in 0..p.dim() {
            p.mean[i] = rng.gen_range(-1.0..1.0);
            p.log_sd[i] = rng.gen_range(-3.0..0.0);
        }
        p
    }

    #[test]
    fn gradient_matches_central_differences() {
        let f = 3;
        let obs = tiny_obs(64, f, 5);
        let prior = PriorConfig::default();
        let batch: Vec<usize> = (0..obs.rows()).collect();
        let mut rng = ChaCha12Rng::seed_from_u64(17);

        for point in 0..3u64 {
            let params = random_params(f, 100 + point);
            let noise = sample_noise(&mut rng, 2, params.dim());
            let (_, grad) =
                elbo_and_grad(&params, &prior, &obs, &batch, &noise, obs.rows()).unwrap();

            let h = 1e-5;
            // spot-check a spread of coordinates in both mean and log_sd
            for &i in &[0usize, f * 10 + 1, params.beta_index(), params.ha_index()] {
                for which in 0..2 {
                    let mut plus = params.clone();
                    let mut minus = params.clone();
                    let (g, slot_plus, slot_minus) = if which == 0 {
                        (grad.mean[i], &mut plus.mean[i], &mut minus.mean[i])
                    } else {
                        (grad.log_sd[i], &mut plus.log_sd[i], &mut minus.log_sd[i])
                    };
                    *slot_plus += h;
                    *slot_minus -= h;
                    let (ep, _) =
                        elbo_and_grad(&plus, &prior, &obs, &batch, &noise, obs.rows()).unwrap();
                    let (em, _) =
                        elbo_and_grad(&minus, &prior, &obs, &batch, &noise, obs.rows()).unwrap();
                    let fd = (ep - em) / (2.0 * h);
                    let denom = g.abs().max(fd.abs()).max(1e-3);
                    assert!(
                        ((g - fd) / denom).abs() < 1e-4,
                        "coord {i} ({}) analytic {g} vs fd {fd}",
                        if which == 0 { "mean" } else { "log_sd" },
                    );
                }
            }
        }
    }

    #[test]
    fn prior_only_fixed_points() {
        // with the likelihood removed (empty-ish: zero-weight via scaling on
        // a zero-row trick is not possible, so optimize the closed-form
        // terms directly), the KL to the prior is minimized at zero means
        // and the mean-field fixed-point sds: prior scales for beta, ha and
        // the terminal alpha, walk_scale/sqrt(2) for interior alphas.
        let f = 2;
        let prior = PriorConfig { alpha_walk_scale: 1.5, beta_scale: 7.0, ha_scale: 3.0, alpha1_scale: 4.0 };
        let obs = tiny_obs(4, f, 9);
        let mut params = VarParams::new(f);
        params.log_sd.fill((0.5f64).ln());
        let dim = params.dim();
        let batch: Vec<usize> = vec![0];
        let noise = vec![vec![0.0; dim]];

        // gradient ascent on prior+entropy only: subtract the likelihood
        // contribution by evaluating with total_count = 0
        for _ in 0..8000 {
            let (_, grad) = elbo_and_grad(&params, &prior, &obs, &batch, &noise, 0).unwrap();
            for i in 0..dim {
                params.mean[i] += 0.01 * grad.mean[i];
                params.log_sd[i] += 0.01 * grad.log_sd[i];
            }
        }

        for i in 0..dim {
            assert_abs_diff_eq!(params.mean[i], 0.0, epsilon = 1e-6);
        }
        assert_abs_diff_eq!(params.log_sd[params.beta_index()].exp(), 7.0, epsilon = 1e-6);
        assert_abs_diff_eq!(params.log_sd[params.ha_index()].exp(), 3.0, epsilon = 1e-6);
        // terminal alpha sees only one chain term
        let last = params.alpha_index(NUM_FRAMES - 1, 0);
        assert_abs_diff_eq!(params.log_sd[last].exp(), 1.5, epsilon = 1e-5);
        // interior alphas see two chain terms
        let mid = params.alpha_index(50, 0);
        assert_abs_diff_eq!(params.log_sd[mid].exp(), 1.5 / 2.0f64.sqrt(), epsilon = 1e-5);
        // the first alpha balances the anchor and the first walk step
        let first = params.alpha_index(0, 1);
        let expected = (1.0 / (1.0 / (4.0f64 * 4.0) + 1.0 / (1.5 * 1.5))).sqrt();
        assert_abs_diff_eq!(params.log_sd[first].exp(), expected, epsilon = 1e-5);
    }

    #[test]
    fn minibatch_rescaling_is_unbiased() {
        // the expectation of the rescaled half-batch ELBO over random
        // minibatches equals the full-batch ELBO (likelihood is linear in
        // the rows; prior and entropy are batch-independent)
        let f = 2;
        let obs = tiny_obs(200, f, 21);
        let prior = PriorConfig::default();
        let params = random_params(f, 3);
        let noise = vec![vec![0.0; params.dim()]]; // deterministic draw at the mean
        let full: Vec<usize> = (0..obs.rows()).collect();
        let (full_elbo, _) = elbo_and_grad(&params, &prior, &obs, &full, &noise, obs.rows()).unwrap();

        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let mut sum = 0.0;
        let reps = 400;
        for _ in 0..reps {
            let batch = rand::seq::index::sample(&mut rng, obs.rows(), 100).into_vec();
            let (e, _) = elbo_and_grad(&params, &prior, &obs, &batch, &noise, obs.rows()).unwrap();
            sum += e;
        }
        let mean = sum / reps as f64;
        // Monte-Carlo tolerance: the batch ELBO has modest variance here
        let rel = ((mean - full_elbo) / full_elbo.abs()).abs();
        assert!(rel < 0.02, "mean {mean} vs full {full_elbo} (rel {rel})");
    }

    #[test]
    fn empty_minibatch_is_an_error() {
        let obs = tiny_obs(10, 2, 1);
        let params = VarParams::new(2);
        let noise = sample_noise(&mut ChaCha12Rng::seed_from_u64(0), 1, params.dim());
        let err = elbo_and_grad(&params, &PriorConfig::default(), &obs, &[], &noise, 10);
        assert!(err.is_err());
    }
}
