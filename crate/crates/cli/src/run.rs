//! Command implementations. Each returns its output files in memory; the
//! caller decides where they go.

use rand::Rng;
use serde::Serialize;
use tbon_core::arms::{gaussian_arm, identify_best_and_worst, IdentifyConfig};
use tbon_core::bon::{ascent_fraction, estimate_effective_beta, run_bracket, cap_coverage_stat, JudgeModel};
use tbon_core::gp::{gp_ucb_loop, random_search_loop, AscentOptions, GpUcbConfig, KernelSpec, RegretRecord, UcbSchedule};
use tbon_core::objective::{make_linear_model, make_smooth_model, SmoothKind};
use tbon_core::orchestrator::{
    best_sequence_csv, history_csv, run_tbon, BernoulliEvaluator, CriticBackend, Evaluator, GaussianEvaluator,
    MockTextCritic, PayloadDigest, SelectorKind, SyntheticCritic, TbonParams, TbonRunOf, TextPayload,
};
use tbon_core::order_stats::{sample_max_spacing, summarize_max_spacing};
use tbon_core::{rng, EmbeddingPoint, Error as CoreError, ObjectiveModel, UnitDirection};

use crate::config::{
    CapstatsParams, Command, GpucbParams, IdentifyParams, MaxstatsParams, RunConfig, TbonConfig, Theorem1Params,
    TournamentParams,
};
use crate::error::{CliError, Context, Result};
use crate::summarize;

/// A named output file.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

fn csv_file(name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<OutputFile> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| CliError::Schema(format!("{name}: {e}"));
    w.write_record(header).map_err(to_err)?;
    for row in rows {
        w.write_record(row).map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Schema(format!("{name}: {e}")))?;
    Ok(OutputFile { name: name.to_string(), bytes })
}

fn row(cells: &[&dyn std::fmt::Display]) -> Vec<String> {
    cells.iter().map(|c| c.to_string()).collect()
}

fn violation(msg: String) -> CliError {
    CliError::Core {
        context: "run check".into(),
        source: CoreError::InvariantViolation(msg),
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(violation(format!("{name} is not finite")))
    }
}

/// Runs the configured command.
pub fn run(cfg: &RunConfig) -> Result<Vec<OutputFile>> {
    match &cfg.command {
        Command::Theorem1(p) => theorem1(p, cfg.seed()?),
        Command::Maxstats(p) => maxstats(p, cfg.seed()?),
        Command::Capstats(p) => capstats(p, cfg.seed()?),
        Command::Gpucb(p) => gpucb(p, cfg.seed()?),
        Command::Tournament(p) => tournament(p, cfg.seed()?),
        Command::Tbon(p) => tbon(p, cfg.seed()?),
        Command::Identify(p) => identify(p, cfg.seed()?),
        Command::Summarize(p) => summarize::summarize_files(&p.inputs, &p.group_by, &p.metrics).map(|f| vec![f]),
    }
}

fn axis(d: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[i] = 1.0;
    v
}

/// Linear field with unit orthogonal `g = e0`, `h = e1`.
pub fn direction_law_model(d: usize, sigma0: f64, validity_radius: f64) -> Result<ObjectiveModel> {
    make_linear_model(axis(d, 0), axis(d, 1), 0.0, sigma0)
        .and_then(|m| m.with_validity_radius(validity_radius))
        .context("theorem1 model")
}

fn theorem1(p: &Theorem1Params, seed: u64) -> Result<Vec<OutputFile>> {
    let sigma0 = p.sigma0.unwrap_or(p.epsilon / 2.0);
    let model = direction_law_model(p.d, sigma0, p.validity_radius)?;
    let base = EmbeddingPoint::zeros(p.d);
    let rows = estimate_effective_beta(&model, &base, p.epsilon, &p.n_values, p.trials, &mut rng::derived(seed, &[0]))
        .context("direction law")?;
    let mut out = Vec::new();
    let mut table = Vec::new();
    for r in &rows {
        check_finite("mean_cosine", r.mean_cosine)?;
        table.push(row(&[&r.n, &r.beta_hat, &r.q_n, &r.mean_cosine, &r.ci_halfwidth, &r.trials]));
    }
    out.push(csv_file(
        "theorem1.csv",
        &["n", "beta_hat", "q_n", "mean_cosine", "ci_halfwidth", "trials"],
        &table,
    )?);
    if p.ascent {
        let rows = ascent_fraction(&model, &base, p.epsilon, &p.n_values, p.trials, &mut rng::derived(seed, &[1]))
            .context("ascent fraction")?;
        let table: Vec<_> = rows.iter().map(|r| row(&[&r.n, &r.beta, &r.fraction, &r.trials])).collect();
        out.push(csv_file("ascent.csv", &["n", "beta", "fraction", "trials"], &table)?);
    }
    Ok(out)
}

fn maxstats(p: &MaxstatsParams, seed: u64) -> Result<Vec<OutputFile>> {
    let mut table = Vec::new();
    for (i, &n) in p.n_values.iter().enumerate() {
        let samples = sample_max_spacing(n, p.trials, &mut rng::derived(seed, &[i as u64])).context("maxima")?;
        let s = summarize_max_spacing(&samples).context("maxima")?;
        for v in [s.mean_gap, s.sd_gap, s.median_max, s.mean_spacing_scaled] {
            check_finite("maxima summary", v)?;
        }
        table.push(row(&[&s.n, &s.q_n, &s.mean_gap, &s.sd_gap, &s.median_max, &s.mean_spacing_scaled, &s.trials]));
    }
    Ok(vec![csv_file(
        "maxstats.csv",
        &["n", "q_n", "mean_gap", "sd_gap", "median_max", "mean_spacing_scaled", "trials"],
        &table,
    )?])
}

fn capstats(p: &CapstatsParams, seed: u64) -> Result<Vec<OutputFile>> {
    let mut table = Vec::new();
    for (i, &d) in p.d_values.iter().enumerate() {
        let v = UnitDirection::normalize(axis(d, 0).into()).context("cap direction")?;
        let rows = cap_coverage_stat(&v, &p.n_values, p.trials, &mut rng::derived(seed, &[i as u64])).context("cap coverage")?;
        for r in rows {
            if !(0.0..=2.0).contains(&r.mean_deficit) {
                return Err(violation(format!("cap deficit {} outside [0, 2]", r.mean_deficit)));
            }
            table.push(row(&[&d, &r.n, &r.mean_deficit, &r.se, &r.trials]));
        }
    }
    Ok(vec![csv_file("capstats.csv", &["d", "n", "mean_deficit", "se", "trials"], &table)?])
}

/// The GP-UCB benchmark setup for a config block.
pub fn gpucb_setup(p: &GpucbParams) -> Result<(ObjectiveModel, GpUcbConfig)> {
    let kind = SmoothKind::from_tag(&p.function, p.d).context("gpucb.function")?;
    let domain = kind.natural_domain();
    let f = make_smooth_model(kind, 0.0).context("gpucb.function")?;
    let kernel = match p.kernel.as_str() {
        "se" => KernelSpec::squared_exponential(p.lengthscale),
        _ => KernelSpec::matern(p.nu, p.lengthscale),
    }
    .context("gpucb.kernel")?;
    let schedule = match p.schedule.as_str() {
        "constant" => UcbSchedule::Constant(p.beta),
        _ => UcbSchedule::Logarithmic,
    };
    let cfg = GpUcbConfig {
        iterations: p.iterations,
        noise_sd: p.noise_sd,
        kernel,
        schedule,
        domain,
        n_starts: p.n_starts,
        ascent: AscentOptions::default(),
    };
    Ok((f, cfg))
}

fn regret_rows(seed: usize, rec: &RegretRecord, table: &mut Vec<Vec<String>>) {
    for t in 0..rec.len() {
        table.push(row(&[&seed, &(t + 1), &rec.observed[t], &rec.cumulative_regret[t], &rec.simple_regret[t]]));
    }
}

fn gpucb(p: &GpucbParams, seed: u64) -> Result<Vec<OutputFile>> {
    let (f, cfg) = gpucb_setup(p)?;
    let header = ["seed", "t", "y", "cum_regret", "simple_regret"];
    let mut gp_table = Vec::new();
    let mut rs_table = Vec::new();
    for s in 0..p.seeds {
        let stream_seed = rng::derived(seed, &[s as u64]).random::<u64>();
        let rec = gp_ucb_loop(&f, &cfg, &mut rng::derived(stream_seed, &[0])).context("gp-ucb loop")?;
        regret_rows(s, &rec, &mut gp_table);
        if p.baseline {
            let rec = random_search_loop(&f, p.iterations, p.noise_sd, &cfg.domain, &mut rng::derived(stream_seed, &[1]))
                .context("random search")?;
            regret_rows(s, &rec, &mut rs_table);
        }
    }
    let mut out = vec![csv_file("gpucb.csv", &header, &gp_table)?];
    if p.baseline {
        out.push(csv_file("gpucb_random.csv", &header, &rs_table)?);
    }
    Ok(out)
}

/// Brackets over `n` entrants with distinct true scores `0..n`; reports how
/// often the true best wins and the mean rank of the winner (0 is best).
fn tournament(p: &TournamentParams, seed: u64) -> Result<Vec<OutputFile>> {
    let judge = JudgeModel::noisy(p.accuracy).context("tournament.accuracy")?;
    let mut table = Vec::new();
    for trial in 0..p.trials {
        let mut r = rng::derived(seed, &[trial as u64]);
        let winner = run_bracket(p.n, p.repeats, &mut r, |a, b, r| Ok(judge.compare(a as f64, b as f64, r)))
            .context("tournament")?;
        let rank = p.n - 1 - winner;
        table.push(row(&[&trial, &p.n, &winner, &u8::from(rank == 0), &rank]));
    }
    Ok(vec![csv_file("tournament.csv", &["trial", "n", "winner", "top1", "rank"], &table)?])
}

#[derive(Serialize)]
struct TbonMetrics {
    backend: String,
    iterations: usize,
    trajectories: usize,
    evaluations: usize,
    generations: usize,
    generations_per_evaluation: Option<f64>,
    reflection_version: u64,
    best_score: f64,
    best_trajectory: usize,
}

fn judge_of(p: &TbonConfig) -> Result<JudgeModel> {
    if p.judge_accuracy == 1.0 {
        Ok(JudgeModel::Exact)
    } else {
        JudgeModel::noisy(p.judge_accuracy).context("tbon.judge_accuracy")
    }
}

pub fn tbon_params(p: &TbonConfig, seed: u64) -> TbonParams {
    TbonParams {
        iterations: p.iterations,
        trajectories: p.trajectories,
        gradient_steps: p.gradient_steps,
        candidates_per_step: p.candidates,
        eval_samples: p.eval_samples,
        master_seed: seed,
        selector: match p.selector.as_str() {
            "oracle" => SelectorKind::Oracle,
            _ => SelectorKind::Tournament { repeats: p.repeats },
        },
    }
}

/// The synthetic backend for a config block.
pub fn synthetic_critic(p: &TbonConfig) -> Result<SyntheticCritic> {
    let model = if p.model == "linear" {
        make_linear_model(axis(p.d, 0), axis(p.d, 1), 0.0, p.sigma0).context("tbon.model")?
    } else {
        make_smooth_model(SmoothKind::from_tag(&p.model, p.d).context("tbon.model")?, p.sigma0).context("tbon.model")?
    };
    let model = match p.validity_radius {
        Some(r) => model.with_validity_radius(r).context("tbon.validity_radius")?,
        None => model,
    };
    SyntheticCritic::new(model, p.epsilon, judge_of(p)?).context("tbon backend")
}

fn tbon_outputs<B: CriticBackend>(p: &TbonConfig, run: &TbonRunOf<B>) -> Result<Vec<OutputFile>>
where
    B::Payload: PayloadDigest,
{
    for w in run.best_sequence.windows(2) {
        if w[1].score < w[0].score {
            return Err(violation(format!(
                "best score fell from {} to {} at iteration {}",
                w[0].score, w[1].score, w[1].iteration
            )));
        }
    }
    let best = run.best_sequence.last().expect("initial scoring always recorded");
    let metrics = TbonMetrics {
        backend: p.backend.clone(),
        iterations: p.iterations,
        trajectories: p.trajectories,
        evaluations: run.metrics.evaluations,
        generations: run.metrics.generations,
        generations_per_evaluation: run.metrics.generations_per_evaluation(),
        reflection_version: run.reflection.version,
        best_score: best.score,
        best_trajectory: best.trajectory,
    };
    let mut json = serde_json::to_vec_pretty(&metrics).map_err(|e| CliError::Schema(e.to_string()))?;
    json.push(b'\n');
    Ok(vec![
        OutputFile { name: "tbon_history.csv".into(), bytes: history_csv(&run.history).into_bytes() },
        OutputFile { name: "tbon_best.csv".into(), bytes: best_sequence_csv(&run.best_sequence).into_bytes() },
        OutputFile { name: "tbon_metrics.json".into(), bytes: json },
    ])
}

fn run_backend<B, E>(p: &TbonConfig, seed: u64, backend: &B, evaluator: &E, initial: Vec<B::Payload>) -> Result<Vec<OutputFile>>
where
    B: CriticBackend,
    E: Evaluator<B::Outcome>,
{
    let run = run_tbon(&tbon_params(p, seed), backend, evaluator, initial).context("tbon run")?;
    tbon_outputs::<B>(p, &run)
}

fn tbon(p: &TbonConfig, seed: u64) -> Result<Vec<OutputFile>> {
    match p.backend.as_str() {
        "synthetic" => {
            let critic = synthetic_critic(p)?;
            let start = EmbeddingPoint::new(vec![p.start; p.d]).context("tbon.start")?;
            let initial = vec![start; p.trajectories];
            run_backend(p, seed, &critic, &GaussianEvaluator { noise_sd: p.noise_sd }, initial)
        }
        _ => {
            let critic = MockTextCritic::new(p.table_size, seed, judge_of(p)?).context("tbon backend")?;
            let initial = (0..p.trajectories).map(|j| TextPayload(format!("T{j}"))).collect();
            run_backend(p, seed, &critic, &BernoulliEvaluator, initial)
        }
    }
}

/// Repeated best/worst identification over evenly spaced Gaussian arms
/// (arm `i` has mean `i * spacing`).
fn identify(p: &IdentifyParams, seed: u64) -> Result<Vec<OutputFile>> {
    let arms: Vec<_> = (0..p.arms).map(|i| gaussian_arm(i as f64 * p.spacing, p.sd)).collect();
    let cfg = IdentifyConfig {
        budget: p.budget,
        k_worst: p.k_worst,
        score_range: p.score_range,
        delta: p.delta,
    };
    let mut table = Vec::new();
    for rep in 0..p.reps {
        let id = identify_best_and_worst(&arms, &cfg, &mut rng::derived(seed, &[rep as u64])).context("identify")?;
        if id.used > p.budget {
            return Err(violation(format!("used {} pulls with budget {}", id.used, p.budget)));
        }
        let worst_hits = id.worst.iter().filter(|&&w| w < p.k_worst).count();
        table.push(row(&[
            &rep,
            &id.best,
            &u8::from(id.best == p.arms - 1),
            &(worst_hits as f64 / p.k_worst as f64),
            &id.used,
        ]));
    }
    Ok(vec![csv_file(
        "identify.csv",
        &["rep", "best", "best_correct", "worst_recall", "used"],
        &table,
    )?])
}
