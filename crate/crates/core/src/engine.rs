//! Seeded episode execution and Monte-Carlo regret estimation.
//!
//! Runs are distributed over the rayon pool but always reduced in run order,
//! so estimates are bitwise identical for any number of worker threads.

use rayon::prelude::*;

use crate::bandit::{BanditInstance, EpisodeResult, RegretEstimate, TraceStep};
use crate::error::{Error, Result};
use crate::policies::{Action, PolicySpec, PolicyState};
use crate::rng::{derive_seed, RewardTableau};

#[derive(Debug, Clone)]
pub struct RunPlan {
    pub instance: BanditInstance,
    pub policy: PolicySpec,
    pub horizon: u64,
    pub n_runs: u64,
    pub base_seed: u64,
    /// Position of the instance in its generated set; part of the seed.
    pub instance_index: u64,
    pub keep_traces: bool,
}

impl RunPlan {
    pub fn new(instance: BanditInstance, policy: PolicySpec, horizon: u64, n_runs: u64) -> Self {
        RunPlan {
            instance,
            policy,
            horizon,
            n_runs,
            base_seed: 0,
            instance_index: 0,
            keep_traces: false,
        }
    }

    pub fn with_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_runs < 1 {
            return Err(Error::InvalidConfig("n_runs must be at least 1".into()));
        }
        validate_horizon(self.instance.num_arms(), self.horizon)
    }

    pub fn run_seed(&self, run_index: u64) -> u64 {
        derive_seed(self.base_seed, self.instance_index, run_index)
    }
}

pub(crate) fn validate_horizon(arms: usize, horizon: u64) -> Result<()> {
    if horizon < 1 || (arms > 1 && arms as u64 >= horizon) {
        return Err(Error::InvalidHorizon { horizon, arms });
    }
    Ok(())
}

/// Plays one episode of exactly `horizon` pulls.
pub fn run_episode(
    instance: &BanditInstance,
    policy: PolicySpec,
    horizon: u64,
    seed: u64,
) -> Result<EpisodeResult> {
    run_episode_traced(instance, policy, horizon, seed, false)
}

pub fn run_episode_traced(
    instance: &BanditInstance,
    policy: PolicySpec,
    horizon: u64,
    seed: u64,
    keep_trace: bool,
) -> Result<EpisodeResult> {
    validate_horizon(instance.num_arms(), horizon)?;
    let spec = policy.resolve(instance)?;
    let mut state = PolicyState::new(spec, instance.num_arms(), horizon)?;
    let mut tableau = RewardTableau::new(instance.arms(), seed);
    let mut trace = keep_trace.then(|| Vec::with_capacity(horizon as usize));

    while state.total_pulls() < horizon {
        let arm = match state.select_arm()? {
            Action::Pull(arm) => arm,
            Action::CommitTo(arm) => {
                state.commit(arm)?;
                break;
            }
        };
        let reward = tableau.draw(arm);
        state.observe(arm, reward)?;
        if let Some(trace) = trace.as_mut() {
            trace.push(TraceStep {
                time: state.total_pulls(),
                arm,
                reward,
            });
        }
    }

    let mut pulls = state.pull_counts().to_vec();
    let mut cum_rewards = state.reward_sums().to_vec();
    if let Some(arm) = state.committed_arm() {
        // The Commit phase is a fixed arm until T; skip the policy bookkeeping.
        for _ in state.total_pulls()..horizon {
            let reward = tableau.draw(arm);
            pulls[arm] += 1;
            cum_rewards[arm] += reward;
            if let Some(trace) = trace.as_mut() {
                trace.push(TraceStep {
                    time: trace.len() as u64 + 1,
                    arm,
                    reward,
                });
            }
        }
    }

    let max_cum_reward = cum_rewards.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(EpisodeResult {
        pulls,
        cum_rewards,
        max_cum_reward,
        commit_time: state.commit_time(),
        committed_arm: state.committed_arm(),
        trace,
    })
}

/// All episodes of a plan, in run order.
pub fn run_episodes(plan: &RunPlan) -> Result<Vec<EpisodeResult>> {
    plan.validate()?;
    (0..plan.n_runs)
        .into_par_iter()
        .map(|r| {
            run_episode_traced(
                &plan.instance,
                plan.policy,
                plan.horizon,
                plan.run_seed(r),
                plan.keep_traces,
            )
        })
        .collect()
}

/// Estimates `mu_max * T - E[max_i cumulative reward_i]`.
pub fn estimate_regret(plan: &RunPlan) -> Result<RegretEstimate> {
    plan.validate()?;
    let samples: Vec<(f64, f64)> = (0..plan.n_runs)
        .into_par_iter()
        .map(|r| {
            run_episode(&plan.instance, plan.policy, plan.horizon, plan.run_seed(r))
                .map(|ep| (ep.max_cum_reward, ep.total_reward()))
        })
        .collect::<Result<_>>()?;
    let (max_rewards, totals): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
    let oracle = plan.instance.best_mean() * plan.horizon as f64;
    Ok(RegretEstimate::from_samples(oracle, &max_rewards, &totals))
}

/// Regret of each policy on the same instance, with every policy seeing the
/// same reward tableau in each run.
pub fn compare_policies(
    instance: &BanditInstance,
    specs: &[PolicySpec],
    horizon: u64,
    n_runs: u64,
    base_seed: u64,
) -> Result<Vec<RegretEstimate>> {
    specs
        .iter()
        .map(|&policy| {
            estimate_regret(&RunPlan::new(instance.clone(), policy, horizon, n_runs).with_seed(base_seed))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandit::ArmDistribution;

    #[test]
    fn oracle_on_extreme_arms() {
        let inst = BanditInstance::bernoulli(&[1.0, 0.0]).unwrap();
        let ep = run_episode(&inst, "oracle:best".parse().unwrap(), 10, 3).unwrap();
        assert_eq!(ep.max_cum_reward, 10.0);
        assert_eq!(ep.pulls, vec![10, 0]);
        ep.check_invariants(10).unwrap();
    }

    #[test]
    fn etc_commit_time() {
        let inst = BanditInstance::bernoulli(&[0.7, 0.3]).unwrap();
        for seed in 0..20 {
            let ep = run_episode(&inst, PolicySpec::Etc, 100, seed).unwrap();
            assert_eq!(ep.commit_time, Some(28));
            ep.check_invariants(100).unwrap();
        }
    }

    #[test]
    fn ada_on_equal_deterministic_arms() {
        let inst = BanditInstance::new(vec![ArmDistribution::deterministic(1.0); 2]).unwrap();
        let ep = run_episode(&inst, PolicySpec::AdaEtc, 100, 0).unwrap();
        assert!(ep.max_cum_reward >= 86.0);
        assert_eq!(ep.committed_arm, Some(0));
        // UCB1 round-robins on the same instance
        let ep = run_episode(&inst, PolicySpec::Ucb1, 100, 0).unwrap();
        assert_eq!(ep.max_cum_reward, 50.0);
    }

    #[test]
    fn traces_cover_the_horizon() {
        let inst = BanditInstance::bernoulli(&[0.6, 0.4, 0.5]).unwrap();
        let ep = run_episode_traced(&inst, PolicySpec::AdaEtc, 200, 11, true).unwrap();
        let trace = ep.trace.as_ref().unwrap();
        assert_eq!(trace.len(), 200);
        for (i, step) in trace.iter().enumerate() {
            assert_eq!(step.time, i as u64 + 1);
        }
        let total: f64 = trace.iter().map(|s| s.reward).sum();
        assert_eq!(total, ep.total_reward());
    }

    #[test]
    fn rejects_bad_horizon() {
        let inst = BanditInstance::bernoulli(&[0.6, 0.4, 0.5]).unwrap();
        assert!(matches!(
            run_episode(&inst, PolicySpec::Etc, 3, 0),
            Err(Error::InvalidHorizon { .. })
        ));
        let plan = RunPlan::new(inst, PolicySpec::Etc, 100, 0);
        assert!(estimate_regret(&plan).is_err());
    }

    #[test]
    fn single_arm_has_zero_regret_variance_only() {
        let inst = BanditInstance::bernoulli(&[0.7]).unwrap();
        let est = estimate_regret(&RunPlan::new(inst, PolicySpec::AdaEtc, 100, 2000).with_seed(5)).unwrap();
        assert!(est.mean_regret.abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn duplicate_specs_give_identical_rows() {
        let inst = BanditInstance::bernoulli(&[0.6, 0.4]).unwrap();
        let rows = compare_policies(&inst, &[PolicySpec::AdaEtc, PolicySpec::AdaEtc], 200, 50, 9).unwrap();
        assert_eq!(rows[0], rows[1]);
    }
}
