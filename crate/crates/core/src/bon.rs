//! Best-of-N gradient steps.
//!
//! A step samples `N` directions around a base point, scores each perturbed
//! point with heteroscedastic Gaussian noise, and keeps the winner, either by
//! exact argmax or through a pairwise tournament. The remaining functions are
//! Monte Carlo statistics showing that the winner's direction tracks the
//! gradient of `mu + q_N sigma`.

use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::objective::{apply_edit, sample_direction, EmbeddingPoint, ObjectiveModel, UnitDirection};
use crate::order_stats::beta_of_n;
use crate::rng::{self, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateBatch {
    pub base: EmbeddingPoint,
    pub epsilon: f64,
    pub directions: Vec<UnitDirection>,
    pub points: Vec<EmbeddingPoint>,
    pub noise: Vec<f64>,
    pub scores: Vec<f64>,
}

impl CandidateBatch {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub index: usize,
    pub direction: UnitDirection,
    pub step: DVector<f64>,
}

impl SelectionResult {
    fn from_batch(batch: &CandidateBatch, index: usize) -> Self {
        SelectionResult {
            index,
            direction: batch.directions[index].clone(),
            step: batch.points[index].as_vector() - batch.base.as_vector(),
        }
    }
}

/// Which position a pairwise judge prefers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    First,
    Second,
}

/// Judge over true scores. A noisy judge is right with probability
/// `accuracy`, independently on every query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JudgeModel {
    Exact,
    Noisy { accuracy: f64 },
}

impl JudgeModel {
    pub fn noisy(accuracy: f64) -> Result<Self> {
        if !(accuracy > 0.5 && accuracy <= 1.0) {
            return Err(Error::invalid("accuracy", "must lie in (0.5, 1]"));
        }
        Ok(if accuracy == 1.0 {
            JudgeModel::Exact
        } else {
            JudgeModel::Noisy { accuracy }
        })
    }

    pub fn accuracy(&self) -> f64 {
        match self {
            JudgeModel::Exact => 1.0,
            JudgeModel::Noisy { accuracy } => *accuracy,
        }
    }

    /// Compares two scores. On an exact tie the first position wins, which
    /// the tournament's order swapping cancels out.
    pub fn compare<R: Rng + ?Sized>(&self, first: f64, second: f64, rng: &mut R) -> Choice {
        let truth = if first >= second { Choice::First } else { Choice::Second };
        match self {
            JudgeModel::Exact => truth,
            JudgeModel::Noisy { accuracy } => {
                if rng.random_bool(*accuracy) {
                    truth
                } else {
                    match truth {
                        Choice::First => Choice::Second,
                        Choice::Second => Choice::First,
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TournamentConfig {
    repeats: u32,
    pub seed: u64,
}

impl TournamentConfig {
    pub fn new(repeats: u32, seed: u64) -> Result<Self> {
        if repeats == 0 || !repeats.is_multiple_of(2) {
            return Err(Error::invalid("repeats", "must be a positive even number"));
        }
        Ok(TournamentConfig { repeats, seed })
    }

    pub fn repeats(&self) -> u32 {
        self.repeats
    }
}

/// Single-elimination bracket over entrants `0..n`.
///
/// Entrants are shuffled; when `n` is not a power of two the first entrants
/// of the shuffled order get round-one byes. Every match asks `judge`
/// `repeats` times, alternating which entrant is shown first; a split vote is
/// settled by a fair coin.
pub fn run_bracket<F>(n: usize, repeats: u32, rng: &mut Stream, judge: F) -> Result<usize>
where
    F: FnMut(usize, usize, &mut Stream) -> Result<Choice>,
{
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    if repeats == 0 || !repeats.is_multiple_of(2) {
        return Err(Error::invalid("repeats", "must be a positive even number"));
    }
    if n == 1 {
        return Ok(0);
    }
    let mut entrants: Vec<usize> = (0..n).collect();
    entrants.shuffle(rng);
    run_bracket_in_order(&entrants, repeats, rng, judge)
}

/// Bracket over `entrants` in the given seeding order, without shuffling.
/// The first `next_power_of_two - len` entrants get round-one byes.
pub fn run_bracket_in_order<F>(entrants: &[usize], repeats: u32, rng: &mut Stream, mut judge: F) -> Result<usize>
where
    F: FnMut(usize, usize, &mut Stream) -> Result<Choice>,
{
    let n = entrants.len();
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    if repeats == 0 || !repeats.is_multiple_of(2) {
        return Err(Error::invalid("repeats", "must be a positive even number"));
    }
    if n == 1 {
        return Ok(entrants[0]);
    }
    let byes = n.next_power_of_two() - n;
    let mut advanced: Vec<usize> = entrants[..byes].to_vec();
    let mut playing: Vec<usize> = entrants[byes..].to_vec();
    loop {
        for pair in playing.chunks(2) {
            let (a, b) = (pair[0], pair[1]);
            let mut a_wins = 0u32;
            for r in 0..repeats {
                let a_preferred = if r % 2 == 0 {
                    judge(a, b, rng)? == Choice::First
                } else {
                    judge(b, a, rng)? == Choice::Second
                };
                a_wins += a_preferred as u32;
            }
            let winner = match (2 * a_wins).cmp(&repeats) {
                std::cmp::Ordering::Greater => a,
                std::cmp::Ordering::Less => b,
                std::cmp::Ordering::Equal => {
                    if rng.random_bool(0.5) {
                        a
                    } else {
                        b
                    }
                }
            };
            advanced.push(winner);
        }
        if advanced.len() == 1 {
            return Ok(advanced[0]);
        }
        playing = std::mem::take(&mut advanced);
    }
}

/// `n` candidates around `base`: uniform sphere directions, standard normal
/// noise, scores `mu(x_i) + sigma(x_i) xi_i`.
pub fn generate_candidates<R: Rng + ?Sized>(
    base: &EmbeddingPoint,
    epsilon: f64,
    n: usize,
    model: &ObjectiveModel,
    rng: &mut R,
) -> Result<CandidateBatch> {
    if n < 1 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon", "must be positive"));
    }
    let d = model.dim();
    let directions: Vec<UnitDirection> = (0..n).map(|_| sample_direction(d, rng)).collect();
    let noise: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let points = directions
        .iter()
        .map(|u| apply_edit(base, epsilon, u, model))
        .collect::<Result<Vec<_>>>()?;
    let scores = points
        .iter()
        .zip(&noise)
        .map(|(p, xi)| model.mu(p) + model.sigma(p) * xi)
        .collect();
    Ok(CandidateBatch {
        base: base.clone(),
        epsilon,
        directions,
        points,
        noise,
        scores,
    })
}

/// Argmax of the scores; ties go to the lowest index.
pub fn select_oracle(batch: &CandidateBatch) -> Result<SelectionResult> {
    let index = argmax(&batch.scores).ok_or(Error::EmptyBatch)?;
    Ok(SelectionResult::from_batch(batch, index))
}

pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        match best {
            Some(b) if values[b] >= *v => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Pairwise tournament over the batch scores, randomness from `cfg.seed`.
pub fn select_tournament(batch: &CandidateBatch, judge: JudgeModel, cfg: TournamentConfig) -> Result<SelectionResult> {
    let mut r = rng::stream(cfg.seed);
    let scores = &batch.scores;
    let index = run_bracket(batch.len(), cfg.repeats, &mut r, |a, b, r| Ok(judge.compare(scores[a], scores[b], r)))?;
    Ok(SelectionResult::from_batch(batch, index))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selector {
    Oracle,
    Tournament { judge: JudgeModel, repeats: u32 },
}

/// One Best-of-N gradient step: generate, then select.
pub fn bon_gradient_step<R: Rng + ?Sized>(
    base: &EmbeddingPoint,
    epsilon: f64,
    n: usize,
    model: &ObjectiveModel,
    selector: Selector,
    rng: &mut R,
) -> Result<SelectionResult> {
    let batch = generate_candidates(base, epsilon, n, model, rng)?;
    match selector {
        Selector::Oracle => select_oracle(&batch),
        Selector::Tournament { judge, repeats } => {
            let cfg = TournamentConfig::new(repeats, rng.random())?;
            select_tournament(&batch, judge, cfg)
        }
    }
}

/// One row of the direction-law experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveBetaRow {
    pub n: usize,
    pub beta_hat: f64,
    pub q_n: f64,
    pub mean_cosine: f64,
    pub ci_halfwidth: f64,
    pub trials: usize,
}

fn linear_gradients(model: &ObjectiveModel, base: &EmbeddingPoint) -> Result<(DVector<f64>, DVector<f64>)> {
    if !model.is_linear() {
        return Err(Error::invalid("model", "the direction law is measured on the linear field"));
    }
    Ok((model.grad_mu(base), model.grad_sigma(base)))
}

/// Runs `trials` oracle-selected Best-of-N steps per `n` and summarizes the
/// selected directions.
///
/// `beta_hat = <mean u, h> / <mean u, g>` estimates the weight that the
/// selection puts on the deviation gradient; it is compared with `q_n`.
/// `mean_cosine` is the average cosine between the selected direction and
/// `(g + q_n h) / |g + q_n h|`. Requires `g` unit and `h` unit or zero,
/// `g` orthogonal to `h`.
pub fn estimate_effective_beta<R: Rng + ?Sized>(
    model: &ObjectiveModel,
    base: &EmbeddingPoint,
    epsilon: f64,
    n_values: &[usize],
    trials: usize,
    rng: &mut R,
) -> Result<Vec<EffectiveBetaRow>> {
    let (g, h) = linear_gradients(model, base)?;
    if (g.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("g", "must be a unit vector"));
    }
    let h_zero = h.norm() == 0.0;
    if !h_zero && (h.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("h", "must be a unit vector or zero"));
    }
    if g.dot(&h).abs() > 1e-9 {
        return Err(Error::invalid("g/h", "must be orthogonal"));
    }
    if trials < 1 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let seed: u64 = rng.random();
    let d = model.dim();
    n_values
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let q = beta_of_n(n as u64)?;
            let v = UnitDirection::normalize(&g + &h * q)?;
            let picks = (0..trials as u64)
                .into_par_iter()
                .map(|trial| {
                    let mut r = rng::derived(seed, &[k as u64, trial]);
                    bon_gradient_step(base, epsilon, n, model, Selector::Oracle, &mut r).map(|s| s.direction)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut mean = DVector::zeros(d);
            let mut cos = Vec::with_capacity(trials);
            for u in &picks {
                mean += u.as_vector();
                cos.push(u.dot(v.as_vector()));
            }
            mean /= trials as f64;
            let along_g = mean.dot(&g);
            let beta_hat = if h_zero {
                0.0
            } else {
                if along_g.abs() < 1e-6 {
                    return Err(Error::Unstable(format!(
                        "projection of the mean direction on g is {along_g:e} at n={n}"
                    )));
                }
                mean.dot(&h) / along_g
            };
            let (mean_cosine, se) = mean_and_se(&cos);
            Ok(EffectiveBetaRow {
                n,
                beta_hat,
                q_n: q,
                mean_cosine,
                ci_halfwidth: 1.96 * se,
                trials,
            })
        })
        .collect()
}

pub(crate) fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapCoverageRow {
    pub n: usize,
    pub mean_deficit: f64,
    pub se: f64,
    pub trials: usize,
}

/// Mean of `1 - max_i v.U_i` over `trials` batches of `n` uniform directions.
pub fn cap_coverage_stat<R: Rng + ?Sized>(
    v: &UnitDirection,
    n_values: &[usize],
    trials: usize,
    rng: &mut R,
) -> Result<Vec<CapCoverageRow>> {
    let d = v.dim();
    if d < 2 {
        return Err(Error::invalid("d", "cap coverage needs d >= 2"));
    }
    if trials < 1 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let seed: u64 = rng.random();
    n_values
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            if n < 1 {
                return Err(Error::invalid("n", "must be at least 1"));
            }
            let deficits: Vec<f64> = (0..trials as u64)
                .into_par_iter()
                .map(|trial| {
                    let mut r = rng::derived(seed, &[k as u64, trial]);
                    let best = (0..n)
                        .map(|_| sample_direction(d, &mut r).dot(v.as_vector()))
                        .fold(f64::NEG_INFINITY, f64::max);
                    1.0 - best
                })
                .collect();
            let (mean_deficit, se) = mean_and_se(&deficits);
            Ok(CapCoverageRow { n, mean_deficit, se, trials })
        })
        .collect()
}

/// Counts candidates whose noise is within `delta` of the batch maximum, and
/// those among them whose direction lies in the cap `v.u >= 1 - eta`.
pub fn thin_band_census(batch: &CandidateBatch, v: &UnitDirection, delta: f64, eta: f64) -> (usize, usize) {
    let top = batch.noise.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut band = 0;
    let mut band_and_cap = 0;
    for (xi, u) in batch.noise.iter().zip(&batch.directions) {
        if *xi >= top - delta {
            band += 1;
            if u.dot(v.as_vector()) >= 1.0 - eta {
                band_and_cap += 1;
            }
        }
    }
    (band, band_and_cap)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentRow {
    pub n: usize,
    pub beta: f64,
    pub fraction: f64,
    pub trials: usize,
}

/// Fraction of oracle-selected steps with `A(x + step) >= A(x)` where
/// `A = mu + q_n sigma` is evaluated exactly on the model.
pub fn ascent_fraction<R: Rng + ?Sized>(
    model: &ObjectiveModel,
    base: &EmbeddingPoint,
    epsilon: f64,
    n_values: &[usize],
    trials: usize,
    rng: &mut R,
) -> Result<Vec<AscentRow>> {
    if trials < 1 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let seed: u64 = rng.random();
    n_values
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let beta = beta_of_n(n as u64)?;
            let acq = |x: &DVector<f64>| model.mu_at(x) + beta * model.sigma_at(x);
            let at_base = acq(base.as_vector());
            let ups = (0..trials as u64)
                .into_par_iter()
                .map(|trial| {
                    let mut r = rng::derived(seed, &[k as u64, trial]);
                    let s = bon_gradient_step(base, epsilon, n, model, Selector::Oracle, &mut r)?;
                    Ok((acq(&(base.as_vector() + &s.step)) >= at_base) as usize)
                })
                .collect::<Result<Vec<usize>>>()?;
            Ok(AscentRow {
                n,
                beta,
                fraction: ups.iter().sum::<usize>() as f64 / trials as f64,
                trials,
            })
        })
        .collect()
}
