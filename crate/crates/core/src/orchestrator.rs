//! Multi-trajectory Best-of-N optimization loop.
//!
//! Each iteration runs every trajectory through `G` Best-of-N gradient steps
//! (`N` cheap candidate generations per step, no evaluations), evaluates the
//! final candidate once, and applies the rollback rule. After all
//! trajectories finish, the shared reflection is rebuilt from the full
//! history. Trajectories run in parallel on streams derived from
//! `(master_seed, t, j)` and their results are merged in `j` order.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use sha2::{Digest as _, Sha256};

use crate::bon::{argmax, run_bracket, Choice, JudgeModel};
use crate::error::{Error, Result};
use crate::objective::{apply_edit, sample_direction, EmbeddingPoint, ObjectiveModel, UnitDirection};
use crate::rng::{self, Stream};

/// A payload together with the outcome the system produced from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<P, O> {
    payload: P,
    outcome: O,
}

impl<P, O> Candidate<P, O> {
    pub fn payload(&self) -> &P {
        &self.payload
    }

    pub fn outcome(&self) -> &O {
        &self.outcome
    }
}

/// Builds a candidate by running the backend's system map on `payload`, so
/// the outcome always belongs to the payload.
pub fn realize<B: CriticBackend>(backend: &B, payload: B::Payload, rng: &mut Stream) -> Result<CandidateOf<B>> {
    let outcome = backend.outcome(&payload, rng)?;
    Ok(Candidate { payload, outcome })
}

pub type CandidateOf<B> = Candidate<<B as CriticBackend>::Payload, <B as CriticBackend>::Outcome>;
pub type HistoryOf<B> = Vec<HistoryEntry<<B as CriticBackend>::Payload, <B as CriticBackend>::Outcome>>;

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry<P, O> {
    pub iteration: usize,
    pub trajectory: usize,
    pub candidate: Candidate<P, O>,
    pub score: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reflection<D> {
    pub content: D,
    pub version: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryState<P, O> {
    pub trajectory: usize,
    pub current: Candidate<P, O>,
    pub accepted_score: f64,
}

/// Short stable fingerprint of a payload for history files.
pub trait PayloadDigest {
    fn digest(&self) -> String;
}

fn sha_prefix(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    hash.iter().take(8).fold(String::with_capacity(16), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

impl PayloadDigest for EmbeddingPoint {
    fn digest(&self) -> String {
        let bytes: Vec<u8> = self.coords().iter().flat_map(|c| c.to_le_bytes()).collect();
        sha_prefix(&bytes)
    }
}

/// Critic operations any backend must provide.
pub trait CriticBackend: Sync {
    type Payload: Clone + Send + Sync + PayloadDigest;
    type Outcome: Clone + Send + Sync;
    type Edit: Send;
    type Digest: Clone + Default + Send + Sync;

    /// System map from payload to outcome (may be stochastic).
    fn outcome(&self, payload: &Self::Payload, rng: &mut Stream) -> Result<Self::Outcome>;

    fn pairwise_judge(
        &self,
        first: &CandidateOf<Self>,
        second: &CandidateOf<Self>,
        reflection: &Reflection<Self::Digest>,
        rng: &mut Stream,
    ) -> Result<Choice>;

    fn meta_reflect(&self, history: &HistoryOf<Self>) -> Result<Self::Digest>;

    fn textual_gradient(
        &self,
        candidate: &CandidateOf<Self>,
        reflection: &Reflection<Self::Digest>,
        rng: &mut Stream,
    ) -> Result<Self::Edit>;

    fn apply(&self, candidate: &CandidateOf<Self>, edit: &Self::Edit) -> Result<Self::Payload>;

    /// Direct score for oracle Best-of-N selection.
    fn oracle_score(&self, _candidate: &CandidateOf<Self>) -> Result<f64> {
        Err(Error::Unavailable("oracle_score"))
    }
}

/// Reward map for costly evaluations.
pub trait Evaluator<O>: Sync {
    fn reward(&self, outcome: &O, rng: &mut Stream) -> Result<f64>;

    /// Declared reward range, if bounded.
    fn reward_bounds(&self) -> Option<(f64, f64)> {
        None
    }
}

/// Mean reward over `samples` draws.
pub fn evaluate<O, E: Evaluator<O> + ?Sized>(outcome: &O, samples: usize, evaluator: &E, rng: &mut Stream) -> Result<f64> {
    if samples < 1 {
        return Err(Error::invalid("eval_samples", "must be at least 1"));
    }
    let mut total = 0.0;
    for _ in 0..samples {
        total += evaluator.reward(outcome, rng)?;
    }
    let score = total / samples as f64;
    if let Some((lo, hi)) = evaluator.reward_bounds() {
        if !(score >= lo && score <= hi) {
            return Err(Error::InvariantViolation(format!("score {score} outside [{lo}, {hi}]")));
        }
    }
    Ok(score)
}

/// Keeps the new candidate when its score does not decrease. Returns the new
/// state and whether the candidate was accepted.
pub fn accept_or_rollback<P, O>(
    state: TrajectoryState<P, O>,
    new_candidate: Candidate<P, O>,
    new_score: f64,
) -> (TrajectoryState<P, O>, bool) {
    if new_score >= state.accepted_score {
        (
            TrajectoryState {
                trajectory: state.trajectory,
                current: new_candidate,
                accepted_score: new_score,
            },
            true,
        )
    } else {
        (state, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectorKind {
    Oracle,
    Tournament { repeats: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TbonParams {
    pub iterations: usize,
    pub trajectories: usize,
    pub gradient_steps: usize,
    pub candidates_per_step: usize,
    pub eval_samples: usize,
    pub master_seed: u64,
    pub selector: SelectorKind,
}

impl TbonParams {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("trajectories", self.trajectories),
            ("gradient_steps", self.gradient_steps),
            ("candidates_per_step", self.candidates_per_step),
            ("eval_samples", self.eval_samples),
        ];
        for (name, v) in counts {
            if v < 1 {
                return Err(Error::invalid(name, "must be at least 1"));
            }
        }
        if let SelectorKind::Tournament { repeats } = self.selector {
            if repeats == 0 || !repeats.is_multiple_of(2) {
                return Err(Error::invalid("repeats", "must be a positive even number"));
            }
        }
        Ok(())
    }
}

/// Work done in one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IterationCounts {
    pub generations: usize,
    pub evaluations: usize,
}

fn select<B: CriticBackend>(
    backend: &B,
    pool: &[CandidateOf<B>],
    reflection: &Reflection<B::Digest>,
    selector: SelectorKind,
    rng: &mut Stream,
) -> Result<usize> {
    match selector {
        SelectorKind::Oracle => {
            let scores = pool.iter().map(|c| backend.oracle_score(c)).collect::<Result<Vec<_>>>()?;
            argmax(&scores).ok_or(Error::EmptyBatch)
        }
        SelectorKind::Tournament { repeats } => run_bracket(pool.len(), repeats, rng, |a, b, r| {
            backend.pairwise_judge(&pool[a], &pool[b], reflection, r)
        }),
    }
}

struct TrajectoryStep<P, O> {
    state: TrajectoryState<P, O>,
    entry: HistoryEntry<P, O>,
    counts: IterationCounts,
}

fn advance_trajectory<B, E>(
    backend: &B,
    evaluator: &E,
    state: TrajectoryState<B::Payload, B::Outcome>,
    reflection: &Reflection<B::Digest>,
    params: &TbonParams,
    t: usize,
) -> Result<TrajectoryStep<B::Payload, B::Outcome>>
where
    B: CriticBackend,
    E: Evaluator<B::Outcome>,
{
    let mut r = rng::derived(params.master_seed, &[t as u64, state.trajectory as u64]);
    let mut counts = IterationCounts::default();
    let mut current = state.current.clone();
    for _ in 0..params.gradient_steps {
        let mut pool = Vec::with_capacity(params.candidates_per_step);
        for _ in 0..params.candidates_per_step {
            let edit = backend.textual_gradient(&current, reflection, &mut r)?;
            let payload = backend.apply(&current, &edit)?;
            pool.push(realize(backend, payload, &mut r)?);
            counts.generations += 1;
        }
        let winner = select(backend, &pool, reflection, params.selector, &mut r)?;
        current = pool.swap_remove(winner);
    }
    let score = evaluate(current.outcome(), params.eval_samples, evaluator, &mut r)?;
    counts.evaluations += 1;
    let trajectory = state.trajectory;
    let (state, accepted) = accept_or_rollback(state, current.clone(), score);
    Ok(TrajectoryStep {
        state,
        entry: HistoryEntry {
            iteration: t,
            trajectory,
            candidate: current,
            score,
            accepted,
        },
        counts,
    })
}

/// One iteration over all trajectories. The reflection is read-only here.
#[allow(clippy::type_complexity)]
pub fn run_iteration<B, E>(
    backend: &B,
    evaluator: &E,
    states: Vec<TrajectoryState<B::Payload, B::Outcome>>,
    reflection: &Reflection<B::Digest>,
    params: &TbonParams,
    t: usize,
) -> Result<(Vec<TrajectoryState<B::Payload, B::Outcome>>, HistoryOf<B>, IterationCounts)>
where
    B: CriticBackend,
    E: Evaluator<B::Outcome>,
{
    params.validate()?;
    let steps = states
        .into_par_iter()
        .map(|s| advance_trajectory(backend, evaluator, s, reflection, params, t))
        .collect::<Result<Vec<_>>>()?;
    let mut totals = IterationCounts::default();
    let mut new_states = Vec::with_capacity(steps.len());
    let mut delta = Vec::with_capacity(steps.len());
    for step in steps {
        totals.generations += step.counts.generations;
        totals.evaluations += step.counts.evaluations;
        new_states.push(step.state);
        delta.push(step.entry);
    }
    Ok((new_states, delta, totals))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestEntry<P, O> {
    pub iteration: usize,
    pub trajectory: usize,
    pub candidate: Candidate<P, O>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunMetrics {
    pub evaluations: usize,
    pub generations: usize,
    pub per_iteration: Vec<IterationCounts>,
}

impl RunMetrics {
    /// Candidate generations per costly evaluation within iterations
    /// (`N * G`); initial scoring is excluded.
    pub fn generations_per_evaluation(&self) -> Option<f64> {
        let (g, e) = self
            .per_iteration
            .iter()
            .fold((0, 0), |(g, e), c| (g + c.generations, e + c.evaluations));
        (e > 0).then(|| g as f64 / e as f64)
    }
}

#[derive(Debug, Clone)]
pub struct TbonRun<P, O, D> {
    /// Best trajectory after initial scoring and after every iteration.
    pub best_sequence: Vec<BestEntry<P, O>>,
    pub history: Vec<HistoryEntry<P, O>>,
    pub final_states: Vec<TrajectoryState<P, O>>,
    pub reflection: Reflection<D>,
    pub metrics: RunMetrics,
}

pub type TbonRunOf<B> = TbonRun<<B as CriticBackend>::Payload, <B as CriticBackend>::Outcome, <B as CriticBackend>::Digest>;

fn best_of<P: Clone, O: Clone>(states: &[TrajectoryState<P, O>], t: usize) -> BestEntry<P, O> {
    let scores: Vec<f64> = states.iter().map(|s| s.accepted_score).collect();
    let j = argmax(&scores).expect("at least one trajectory");
    BestEntry {
        iteration: t,
        trajectory: states[j].trajectory,
        candidate: states[j].current.clone(),
        score: states[j].accepted_score,
    }
}

/// Full run: score the initial payloads, then `iterations` rounds, each
/// followed by one meta-reflection over the whole history.
pub fn run_tbon<B, E>(params: &TbonParams, backend: &B, evaluator: &E, initial: Vec<B::Payload>) -> Result<TbonRunOf<B>>
where
    B: CriticBackend,
    E: Evaluator<B::Outcome>,
{
    params.validate()?;
    if initial.len() != params.trajectories {
        return Err(Error::invalid(
            "initial",
            format!("{} initial payloads for {} trajectories", initial.len(), params.trajectories),
        ));
    }
    let mut metrics = RunMetrics::default();
    let mut history: HistoryOf<B> = Vec::new();
    let mut states = Vec::with_capacity(initial.len());
    for (j, payload) in initial.into_iter().enumerate() {
        let mut r = rng::derived(params.master_seed, &[0, j as u64]);
        let cand = realize(backend, payload, &mut r)?;
        let score = evaluate(cand.outcome(), params.eval_samples, evaluator, &mut r)?;
        metrics.evaluations += 1;
        history.push(HistoryEntry {
            iteration: 0,
            trajectory: j,
            candidate: cand.clone(),
            score,
            accepted: true,
        });
        states.push(TrajectoryState {
            trajectory: j,
            current: cand,
            accepted_score: score,
        });
    }
    let mut reflection = Reflection {
        content: B::Digest::default(),
        version: 0,
    };
    let mut best_sequence = vec![best_of(&states, 0)];
    for t in 1..=params.iterations {
        let previous: Vec<f64> = states.iter().map(|s| s.accepted_score).collect();
        let (next, delta, counts) = run_iteration(backend, evaluator, states, &reflection, params, t)?;
        states = next;
        for (s, before) in states.iter().zip(&previous) {
            if s.accepted_score < *before {
                return Err(Error::InvariantViolation(format!(
                    "trajectory {} accepted score decreased at iteration {t}",
                    s.trajectory
                )));
            }
        }
        history.extend(delta);
        if history.len() != params.trajectories * (t + 1) {
            return Err(Error::InvariantViolation("history size mismatch".into()));
        }
        metrics.evaluations += counts.evaluations;
        metrics.generations += counts.generations;
        metrics.per_iteration.push(counts);
        reflection = Reflection {
            content: backend.meta_reflect(&history)?,
            version: reflection.version + 1,
        };
        best_sequence.push(best_of(&states, t));
    }
    let keys: HashSet<(usize, usize)> = history.iter().map(|h| (h.iteration, h.trajectory)).collect();
    if keys.len() != history.len() {
        return Err(Error::InvariantViolation("duplicate (iteration, trajectory) in history".into()));
    }
    Ok(TbonRun {
        best_sequence,
        history,
        final_states: states,
        reflection,
        metrics,
    })
}

/// History as CSV: `t,j,score,accepted_flag,payload_digest`.
pub fn history_csv<P: PayloadDigest, O>(history: &[HistoryEntry<P, O>]) -> String {
    let mut out = String::from("t,j,score,accepted_flag,payload_digest\n");
    for h in history {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            h.iteration,
            h.trajectory,
            h.score,
            h.accepted as u8,
            h.candidate.payload().digest()
        );
    }
    out
}

/// Best sequence as CSV: `t,j,score,payload_digest`.
pub fn best_sequence_csv<P: PayloadDigest, O>(best: &[BestEntry<P, O>]) -> String {
    let mut out = String::from("t,j,score,payload_digest\n");
    for b in best {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            b.iteration,
            b.trajectory,
            b.score,
            b.candidate.payload().digest()
        );
    }
    out
}

/// One history row as seen by a reflection.
#[derive(Debug, Clone, PartialEq)]
pub struct DigestEntry {
    pub iteration: usize,
    pub trajectory: usize,
    pub score: f64,
    pub accepted: bool,
    pub payload_digest: String,
}

/// The highest- and lowest-scoring history rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreDigest {
    /// Highest scores first.
    pub best: Vec<DigestEntry>,
    /// Lowest scores first.
    pub worst: Vec<DigestEntry>,
    pub entries: usize,
}

/// Top `k` and bottom `k` entries by score. With fewer than `2k` entries the
/// two lists partition the whole history.
pub fn best_worst_digest<P: PayloadDigest, O>(history: &[HistoryEntry<P, O>], k: usize) -> ScoreDigest {
    let mut order: Vec<usize> = (0..history.len()).collect();
    order.sort_by(|&a, &b| {
        history[b]
            .score
            .total_cmp(&history[a].score)
            .then((history[a].iteration, history[a].trajectory).cmp(&(history[b].iteration, history[b].trajectory)))
    });
    let row = |i: usize| DigestEntry {
        iteration: history[i].iteration,
        trajectory: history[i].trajectory,
        score: history[i].score,
        accepted: history[i].accepted,
        payload_digest: history[i].candidate.payload().digest(),
    };
    let top = k.min(order.len());
    let bottom = k.min(order.len() - top);
    ScoreDigest {
        best: order[..top].iter().map(|&i| row(i)).collect(),
        worst: order[order.len() - bottom..].iter().rev().map(|&i| row(i)).collect(),
        entries: history.len(),
    }
}

/// Outcome of a synthetic payload: the true fields and one noisy draw
/// `mu + sigma xi`, the quantity Best-of-N compares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticOutcome {
    pub mu: f64,
    pub sigma: f64,
    pub draw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticEdit {
    pub epsilon: f64,
    pub direction: UnitDirection,
}

/// Embedding-space backend: edits are sphere directions of radius
/// `epsilon`, the judge compares noisy draws.
#[derive(Debug, Clone)]
pub struct SyntheticCritic {
    pub model: ObjectiveModel,
    pub epsilon: f64,
    pub judge: JudgeModel,
}

impl SyntheticCritic {
    pub fn new(model: ObjectiveModel, epsilon: f64, judge: JudgeModel) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid("epsilon", "must be positive"));
        }
        Ok(SyntheticCritic { model, epsilon, judge })
    }
}

impl CriticBackend for SyntheticCritic {
    type Payload = EmbeddingPoint;
    type Outcome = SyntheticOutcome;
    type Edit = SyntheticEdit;
    type Digest = ScoreDigest;

    fn outcome(&self, payload: &EmbeddingPoint, rng: &mut Stream) -> Result<SyntheticOutcome> {
        let mu = self.model.mu(payload);
        let sigma = self.model.sigma(payload);
        let xi: f64 = rng.sample(StandardNormal);
        Ok(SyntheticOutcome { mu, sigma, draw: mu + sigma * xi })
    }

    fn pairwise_judge(
        &self,
        first: &CandidateOf<Self>,
        second: &CandidateOf<Self>,
        _reflection: &Reflection<ScoreDigest>,
        rng: &mut Stream,
    ) -> Result<Choice> {
        Ok(self.judge.compare(first.outcome().draw, second.outcome().draw, rng))
    }

    fn meta_reflect(&self, history: &HistoryOf<Self>) -> Result<ScoreDigest> {
        Ok(best_worst_digest(history, 5))
    }

    fn textual_gradient(
        &self,
        _candidate: &CandidateOf<Self>,
        _reflection: &Reflection<ScoreDigest>,
        rng: &mut Stream,
    ) -> Result<SyntheticEdit> {
        Ok(SyntheticEdit {
            epsilon: self.epsilon,
            direction: sample_direction(self.model.dim(), rng),
        })
    }

    fn apply(&self, candidate: &CandidateOf<Self>, edit: &SyntheticEdit) -> Result<EmbeddingPoint> {
        apply_edit(candidate.payload(), edit.epsilon, &edit.direction, &self.model)
    }

    fn oracle_score(&self, candidate: &CandidateOf<Self>) -> Result<f64> {
        Ok(candidate.outcome().draw)
    }
}

/// Reward `mu + noise_sd * z` for synthetic outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEvaluator {
    pub noise_sd: f64,
}

impl Evaluator<SyntheticOutcome> for GaussianEvaluator {
    fn reward(&self, outcome: &SyntheticOutcome, rng: &mut Stream) -> Result<f64> {
        let z: f64 = rng.sample(StandardNormal);
        Ok(outcome.mu + self.noise_sd * z)
    }
}

/// Text payload for the scripted critic, e.g. `"A+3+1"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TextPayload(pub String);

impl PayloadDigest for TextPayload {
    fn digest(&self) -> String {
        sha_prefix(self.0.as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MockOutcome {
    pub text: String,
    /// Success probability in `(0, 1)`.
    pub quality: f64,
}

/// Scripted critic without any language model: edit `k` appends `+k` to the
/// payload, and a seeded table gives every edit a value; the outcome quality
/// is the logistic of the summed values.
#[derive(Debug, Clone)]
pub struct MockTextCritic {
    edit_values: Vec<f64>,
    judge: JudgeModel,
}

impl MockTextCritic {
    pub fn new(table_size: usize, seed: u64, judge: JudgeModel) -> Result<Self> {
        if table_size < 1 {
            return Err(Error::invalid("table_size", "must be at least 1"));
        }
        let mut r = rng::stream(seed);
        Ok(MockTextCritic {
            edit_values: (0..table_size).map(|_| r.random_range(-1.0..1.0)).collect(),
            judge,
        })
    }

    pub fn edit_values(&self) -> &[f64] {
        &self.edit_values
    }

    pub fn quality(&self, text: &str) -> Result<f64> {
        let mut total = 0.0;
        for tok in text.split('+').skip(1) {
            let k: usize = tok
                .parse()
                .map_err(|_| Error::Backend(format!("unscripted token `{tok}` in `{text}`")))?;
            total += self
                .edit_values
                .get(k)
                .ok_or_else(|| Error::Backend(format!("edit #{k} is not in the table")))?;
        }
        Ok(1.0 / (1.0 + (-total).exp()))
    }

    /// Scripted lookup: `apply("A", 3) == "A+3"`.
    pub fn apply_text(&self, text: &str, edit: usize) -> Result<String> {
        if edit >= self.edit_values.len() {
            return Err(Error::Backend(format!("edit #{edit} is not in the table")));
        }
        Ok(format!("{text}+{edit}"))
    }
}

impl CriticBackend for MockTextCritic {
    type Payload = TextPayload;
    type Outcome = MockOutcome;
    type Edit = usize;
    type Digest = Vec<String>;

    fn outcome(&self, payload: &TextPayload, _rng: &mut Stream) -> Result<MockOutcome> {
        Ok(MockOutcome {
            text: payload.0.clone(),
            quality: self.quality(&payload.0)?,
        })
    }

    fn pairwise_judge(
        &self,
        first: &CandidateOf<Self>,
        second: &CandidateOf<Self>,
        _reflection: &Reflection<Vec<String>>,
        rng: &mut Stream,
    ) -> Result<Choice> {
        Ok(self.judge.compare(first.outcome().quality, second.outcome().quality, rng))
    }

    fn meta_reflect(&self, history: &HistoryOf<Self>) -> Result<Vec<String>> {
        let digest = best_worst_digest(history, 5);
        let text_of = |e: &DigestEntry| {
            history
                .iter()
                .find(|h| h.iteration == e.iteration && h.trajectory == e.trajectory)
                .map(|h| h.candidate.payload().0.clone())
                .unwrap_or_default()
        };
        let mut rules: Vec<String> = digest.best.iter().map(|e| format!("keep: {}", text_of(e))).collect();
        rules.extend(digest.worst.iter().map(|e| format!("avoid: {}", text_of(e))));
        Ok(rules)
    }

    fn textual_gradient(
        &self,
        _candidate: &CandidateOf<Self>,
        _reflection: &Reflection<Vec<String>>,
        rng: &mut Stream,
    ) -> Result<usize> {
        Ok(rng.random_range(0..self.edit_values.len()))
    }

    fn apply(&self, candidate: &CandidateOf<Self>, edit: &usize) -> Result<TextPayload> {
        self.apply_text(&candidate.payload().0, *edit).map(TextPayload)
    }

    fn oracle_score(&self, candidate: &CandidateOf<Self>) -> Result<f64> {
        Ok(candidate.outcome().quality)
    }
}

/// Bernoulli reward with the outcome's quality as success probability.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BernoulliEvaluator;

impl Evaluator<MockOutcome> for BernoulliEvaluator {
    fn reward(&self, outcome: &MockOutcome, rng: &mut Stream) -> Result<f64> {
        Ok(if rng.random::<f64>() < outcome.quality { 1.0 } else { 0.0 })
    }

    fn reward_bounds(&self) -> Option<(f64, f64)> {
        Some((0.0, 1.0))
    }
}
