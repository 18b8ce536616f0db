//! Arm identification over noisy candidates and probability-weighted scores.

use rand::Rng;

use crate::bon::argmax;
use crate::error::{Error, Result};
use crate::rng::Stream;

/// Expected rating `sum_k k p_k` over the ratings 1..=5.
///
/// Probabilities that do not sum to one (within 1e-9) are renormalized with
/// a warning.
pub fn expected_score_from_probs(probs: &[f64; 5]) -> Result<f64> {
    if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(Error::invalid("probs", "entries must be finite and non-negative"));
    }
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return Err(Error::invalid("probs", "all probabilities are zero"));
    }
    if (total - 1.0).abs() > 1e-9 {
        log::warn!("rating probabilities sum to {total}; renormalizing");
    }
    Ok(probs.iter().enumerate().map(|(k, p)| (k + 1) as f64 * p).sum::<f64>() / total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentifyConfig {
    pub budget: usize,
    pub k_worst: usize,
    /// Width of the declared reward range, used by the Hoeffding radius.
    pub score_range: f64,
    /// Overall failure probability of the confidence intervals.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Identification {
    pub best: usize,
    /// Lowest estimated means first.
    pub worst: Vec<usize>,
    pub means: Vec<f64>,
    pub pulls: Vec<usize>,
    pub used: usize,
}

struct Tally {
    sums: Vec<f64>,
    pulls: Vec<usize>,
    range: f64,
    log_term: f64,
}

impl Tally {
    fn mean(&self, i: usize) -> f64 {
        self.sums[i] / self.pulls[i] as f64
    }

    // Anytime Hoeffding radius with a union bound over arms and pull counts.
    fn radius(&self, i: usize) -> f64 {
        let n = self.pulls[i] as f64;
        self.range * ((self.log_term + 2.0 * n.ln()) / (2.0 * n)).sqrt()
    }

    fn lcb(&self, i: usize) -> f64 {
        self.mean(i) - self.radius(i)
    }

    fn ucb(&self, i: usize) -> f64 {
        self.mean(i) + self.radius(i)
    }
}

/// Successive elimination alternating between the best-arm frontier and the
/// worst-`k` frontier.
///
/// Every arm is sampled once; then rounds alternate. A best round samples
/// each arm still in contention for best and drops arms whose upper bound
/// falls below the largest lower bound. A worst round samples each arm whose
/// worst-`k` membership is undecided: an arm is in when at least `K - k`
/// arms are confidently above it, out when at least `k` arms are
/// confidently below it. At budget exhaustion the point estimates decide.
pub fn identify_best_and_worst<A>(arms: &[A], cfg: &IdentifyConfig, rng: &mut Stream) -> Result<Identification>
where
    A: Fn(&mut Stream) -> f64,
{
    let k = arms.len();
    if k == 0 {
        return Err(Error::invalid("candidates", "need at least one candidate"));
    }
    if cfg.budget < k {
        return Err(Error::invalid(
            "budget",
            format!("budget {} cannot sample each of {k} candidates once", cfg.budget),
        ));
    }
    if cfg.k_worst < 1 || cfg.k_worst > k {
        return Err(Error::invalid("k_worst", format!("must lie in 1..={k}")));
    }
    if !(cfg.score_range >= 0.0 && cfg.score_range.is_finite()) {
        return Err(Error::invalid("score_range", "must be non-negative"));
    }
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(Error::invalid("delta", "must lie in (0, 1)"));
    }
    let mut tally = Tally {
        sums: vec![0.0; k],
        pulls: vec![0; k],
        range: cfg.score_range,
        log_term: (4.0 * k as f64 / cfg.delta).ln(),
    };
    let mut used = 0;
    let pull = |i: usize, tally: &mut Tally, rng: &mut Stream| {
        tally.sums[i] += arms[i](rng);
        tally.pulls[i] += 1;
    };
    for i in 0..k {
        pull(i, &mut tally, rng);
        used += 1;
    }

    let mut contenders: Vec<usize> = (0..k).collect();
    let mut worst_in: Vec<usize> = Vec::new();
    let mut undecided: Vec<usize> = if cfg.k_worst == k { Vec::new() } else { (0..k).collect() };
    if cfg.k_worst == k {
        worst_in = (0..k).collect();
    }

    let prune_best = |contenders: &mut Vec<usize>, tally: &Tally| {
        let top = contenders.iter().map(|&i| tally.lcb(i)).fold(f64::NEG_INFINITY, f64::max);
        contenders.retain(|&i| tally.ucb(i) >= top);
    };
    let prune_worst = |undecided: &mut Vec<usize>, worst_in: &mut Vec<usize>, tally: &Tally| {
        let mut still = Vec::new();
        for &i in undecided.iter() {
            let below = (0..k).filter(|&j| j != i && tally.ucb(j) < tally.lcb(i)).count();
            let above = (0..k).filter(|&j| j != i && tally.lcb(j) > tally.ucb(i)).count();
            if above >= k - cfg.k_worst {
                worst_in.push(i);
            } else if below < cfg.k_worst {
                still.push(i);
            }
        }
        *undecided = still;
        if worst_in.len() >= cfg.k_worst {
            undecided.clear();
        } else if worst_in.len() + undecided.len() <= cfg.k_worst {
            worst_in.append(undecided);
        }
    };
    prune_best(&mut contenders, &tally);
    prune_worst(&mut undecided, &mut worst_in, &tally);

    let mut best_turn = true;
    while used < cfg.budget && (contenders.len() > 1 || !undecided.is_empty()) {
        let pool = if best_turn { &contenders } else { &undecided };
        if pool.len() > 1 || (!best_turn && !pool.is_empty()) {
            for &i in pool.clone().iter() {
                if used == cfg.budget {
                    break;
                }
                pull(i, &mut tally, rng);
                used += 1;
            }
            if best_turn {
                prune_best(&mut contenders, &tally);
            } else {
                prune_worst(&mut undecided, &mut worst_in, &tally);
            }
        }
        best_turn = !best_turn;
    }

    let means: Vec<f64> = (0..k).map(|i| tally.mean(i)).collect();
    let contender_means: Vec<f64> = contenders.iter().map(|&i| means[i]).collect();
    let best = contenders[argmax(&contender_means).expect("contenders never empty")];
    let mut rest = undecided;
    rest.sort_by(|&a, &b| means[a].total_cmp(&means[b]).then(a.cmp(&b)));
    let mut worst = worst_in;
    worst.extend(rest.into_iter().take(cfg.k_worst.saturating_sub(worst.len())));
    worst.truncate(cfg.k_worst);
    worst.sort_by(|&a, &b| means[a].total_cmp(&means[b]).then(a.cmp(&b)));
    Ok(Identification {
        best,
        worst,
        means,
        pulls: tally.pulls,
        used,
    })
}

/// Gaussian arm helper: mean plus `sd` times a standard normal draw.
pub fn gaussian_arm(mean: f64, sd: f64) -> impl Fn(&mut Stream) -> f64 {
    move |rng: &mut Stream| mean + sd * rng.sample::<f64, _>(rand_distr::StandardNormal)
}
