//! Domain types shared by the policies, the simulation engine and the bound
//! evaluators: reward laws, bandit instances and per-episode results.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A reward law supported on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ArmDistribution {
    Bernoulli { p: f64 },
    Deterministic { v: f64 },
}

impl ArmDistribution {
    pub fn bernoulli(p: f64) -> Self {
        ArmDistribution::Bernoulli { p }
    }

    pub fn deterministic(v: f64) -> Self {
        ArmDistribution::Deterministic { v }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            ArmDistribution::Bernoulli { p } => p,
            ArmDistribution::Deterministic { v } => v,
        }
    }

    pub fn mean(&self) -> f64 {
        self.parameter()
    }

    pub fn is_bernoulli(&self) -> bool {
        matches!(self, ArmDistribution::Bernoulli { .. })
    }

    /// Maps a uniform variate `u` in `[0, 1)` to a reward.
    #[inline]
    pub fn sample_with(&self, u: f64) -> f64 {
        match *self {
            ArmDistribution::Bernoulli { p } => {
                if u < p {
                    1.0
                } else {
                    0.0
                }
            }
            ArmDistribution::Deterministic { v } => v,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceRepr {
    arms: Vec<ArmDistribution>,
}

/// An ordered list of arms together with their means, gaps and optimal arm.
///
/// Arms keep the order they were given in; nothing downstream relabels them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct BanditInstance {
    arms: Vec<ArmDistribution>,
    means: Vec<f64>,
    gaps: Vec<f64>,
    best_arm: usize,
    unique_best: bool,
}

impl TryFrom<InstanceRepr> for BanditInstance {
    type Error = Error;

    fn try_from(repr: InstanceRepr) -> Result<Self> {
        make_instance(repr.arms)
    }
}

impl From<BanditInstance> for InstanceRepr {
    fn from(instance: BanditInstance) -> Self {
        InstanceRepr {
            arms: instance.arms,
        }
    }
}

/// Validates arm parameters and derives means, gaps and the best arm.
pub fn make_instance(arms: Vec<ArmDistribution>) -> Result<BanditInstance> {
    if arms.is_empty() {
        return Err(Error::EmptyInstance);
    }
    for (index, arm) in arms.iter().enumerate() {
        let value = arm.parameter();
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::ParameterOutOfRange { index, value });
        }
    }
    let means: Vec<f64> = arms.iter().map(ArmDistribution::mean).collect();
    let mut best_arm = 0;
    for (i, &m) in means.iter().enumerate() {
        if m > means[best_arm] {
            best_arm = i;
        }
    }
    let best = means[best_arm];
    let gaps = means.iter().map(|&m| best - m).collect();
    let unique_best = means.iter().filter(|&&m| m == best).count() == 1;
    Ok(BanditInstance {
        arms,
        means,
        gaps,
        best_arm,
        unique_best,
    })
}

impl BanditInstance {
    pub fn new(arms: Vec<ArmDistribution>) -> Result<Self> {
        make_instance(arms)
    }

    pub fn bernoulli(means: &[f64]) -> Result<Self> {
        make_instance(means.iter().map(|&p| ArmDistribution::bernoulli(p)).collect())
    }

    pub fn arms(&self) -> &[ArmDistribution] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// Lowest-index arm attaining the largest mean.
    pub fn best_arm(&self) -> usize {
        self.best_arm
    }

    pub fn best_mean(&self) -> f64 {
        self.means[self.best_arm]
    }

    pub fn unique_best(&self) -> bool {
        self.unique_best
    }

    pub fn all_bernoulli(&self) -> bool {
        self.arms.iter().all(ArmDistribution::is_bernoulli)
    }

    pub fn sorted_view(&self) -> SortedView {
        sorted_view(self)
    }

    /// Returns a new instance with arm `i` of the result equal to arm
    /// `permutation[i]` of `self`.
    pub fn permuted(&self, permutation: &[usize]) -> Result<Self> {
        make_instance(permutation.iter().map(|&i| self.arms[i]).collect())
    }
}

/// Arms ordered by descending mean, ties broken by original index.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedView {
    pub permutation: Vec<usize>,
    pub sorted_gaps: Vec<f64>,
}

pub fn sorted_view(instance: &BanditInstance) -> SortedView {
    let means = instance.means();
    let mut permutation: Vec<usize> = (0..means.len()).collect();
    // stable sort keeps lower indices first among equal means
    permutation.sort_by(|&a, &b| means[b].total_cmp(&means[a]));
    let sorted_gaps = permutation.iter().map(|&i| instance.gaps()[i]).collect();
    SortedView {
        permutation,
        sorted_gaps,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    /// 1-based period.
    pub time: u64,
    pub arm: usize,
    pub reward: f64,
}

/// Outcome of one episode of length T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub pulls: Vec<u64>,
    pub cum_rewards: Vec<f64>,
    pub max_cum_reward: f64,
    /// Number of periods spent exploring before the commit decision.
    pub commit_time: Option<u64>,
    pub committed_arm: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<TraceStep>>,
}

impl EpisodeResult {
    pub fn horizon(&self) -> u64 {
        self.pulls.iter().sum()
    }

    pub fn total_reward(&self) -> f64 {
        self.cum_rewards.iter().sum()
    }

    /// Checks the structural invariants every simulated episode must satisfy.
    pub fn check_invariants(&self, horizon: u64) -> std::result::Result<(), String> {
        if self.horizon() != horizon {
            return Err(format!("sum(pulls)={} != T={}", self.horizon(), horizon));
        }
        let max = self
            .cum_rewards
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if max != self.max_cum_reward {
            return Err(format!(
                "max_cum_reward {} != max(cum_rewards) {}",
                self.max_cum_reward, max
            ));
        }
        for (i, (&r, &n)) in self.cum_rewards.iter().zip(&self.pulls).enumerate() {
            if r < 0.0 || r > n as f64 {
                return Err(format!("arm {i}: cum_reward {r} outside [0, {n}]"));
            }
        }
        if self.committed_arm.is_some() {
            match self.commit_time {
                Some(w) if w <= horizon => {}
                other => return Err(format!("committed with commit_time {other:?}")),
            }
        }
        Ok(())
    }
}

/// Monte-Carlo estimate of the max-objective regret of one policy on one
/// instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretEstimate {
    pub mean_regret: f64,
    pub stderr: f64,
    pub n_runs: u64,
    pub mean_max_reward: f64,
    /// `mu_max * T`.
    pub oracle_reward: f64,
    /// Auxiliary: mean of the summed reward over all arms.
    pub mean_total_reward: f64,
}

impl RegretEstimate {
    /// Summarizes per-run maximum (and total) rewards, reduced in run order.
    pub fn from_samples(oracle_reward: f64, max_rewards: &[f64], total_rewards: &[f64]) -> Self {
        let n = max_rewards.len();
        let nf = n as f64;
        let mean_max = max_rewards.iter().sum::<f64>() / nf;
        let stderr = if n > 1 {
            let ss: f64 = max_rewards.iter().map(|x| (x - mean_max).powi(2)).sum();
            (ss / (nf - 1.0)).sqrt() / nf.sqrt()
        } else {
            0.0
        };
        RegretEstimate {
            mean_regret: oracle_reward - mean_max,
            stderr,
            n_runs: n as u64,
            mean_max_reward: mean_max,
            oracle_reward,
            mean_total_reward: total_rewards.iter().sum::<f64>() / nf,
        }
    }
}
