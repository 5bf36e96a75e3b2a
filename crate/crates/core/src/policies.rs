//! Policies for the max-objective bandit: ADA-ETC and its benchmarks.
//!
//! Every policy is driven through [`PolicyState`]: the caller asks for an
//! [`Action`] with [`PolicyState::select_arm`], applies a `CommitTo` with
//! [`PolicyState::commit`], and reports each reward with
//! [`PolicyState::observe`]. Ties are always broken towards the lowest arm
//! index so traces are reproducible bit for bit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bandit::BanditInstance;
use crate::error::{Error, Result};

/// Per-arm exploration budget `ceil((T/K)^(2/3))`.
///
/// The floating-point guess is corrected with the exact integer test
/// `(m-1)^3 K^2 < T^2 <= m^3 K^2`.
pub fn tau(horizon: u64, arms: usize) -> Result<u64> {
    if horizon < 1 || arms < 1 || arms as u64 >= horizon {
        return Err(Error::InvalidHorizon { horizon, arms });
    }
    Ok(exploration_budget(horizon, arms as u64))
}

fn exploration_budget(horizon: u64, arms: u64) -> u64 {
    let t2 = (horizon as u128) * (horizon as u128);
    let k2 = (arms as u128) * (arms as u128);
    let covers = |m: u64| {
        let m = m as u128;
        m * m * m * k2 >= t2
    };
    let guess = (horizon as f64 / arms as f64).powf(2.0 / 3.0).ceil().max(1.0) as u64;
    let mut m = guess;
    while !covers(m) {
        m += 1;
    }
    while m > 1 && covers(m - 1) {
        m -= 1;
    }
    m
}

/// `log(max(a, 1))`.
#[inline]
pub fn log_plus(a: f64) -> f64 {
    a.max(1.0).ln()
}

/// ADA-ETC upper confidence bound after `n` pulls with empirical mean `mu_bar`.
pub fn adaetc_ucb(mu_bar: f64, n: u64, horizon: u64, arms: usize, tau: u64) -> Result<f64> {
    if n < 1 {
        return Err(Error::NonPositivePulls);
    }
    Ok(ada_ucb_unchecked(mu_bar, n, horizon as f64 / arms as f64, tau))
}

#[inline]
fn ada_ucb_unchecked(mu_bar: f64, n: u64, horizon_per_arm: f64, tau: u64) -> f64 {
    if n >= tau {
        return mu_bar;
    }
    let nf = n as f64;
    mu_bar + (4.0 / nf * log_plus(horizon_per_arm / (nf * nf.sqrt()))).sqrt()
}

/// ADA-ETC (and NADA-ETC) lower confidence bound: zero until `tau` pulls,
/// then the empirical mean.
pub fn adaetc_lcb(mu_bar: f64, n: u64, tau: u64) -> Result<f64> {
    if n < 1 {
        return Err(Error::NonPositivePulls);
    }
    Ok(if n < tau { 0.0 } else { mu_bar })
}

/// UCB1 index `mu_bar + sqrt(4 log(T) / n)`.
pub fn ucb1_index(mu_bar: f64, n: u64, horizon: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::NonPositivePulls);
    }
    Ok(mu_bar + ucb1_bonus(n, horizon.ln()))
}

#[inline]
fn ucb1_bonus(n: u64, log_horizon: f64) -> f64 {
    (4.0 / n as f64 * log_horizon).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OracleTarget {
    /// Resolved against the instance's best arm when the episode starts.
    Best,
    Arm(usize),
}

/// Which policy to run. Parses from and displays as the CLI names
/// `ada-etc`, `nada-etc`, `succ`, `etc`, `ucb1`, `ucb1-s`, `oracle:<arm>`
/// and `oracle:best`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicySpec {
    AdaEtc,
    NadaEtc,
    Succ,
    Etc,
    Ucb1,
    Ucb1S,
    Oracle(OracleTarget),
}

impl PolicySpec {
    /// The six benchmark policies, without the oracle.
    pub const BENCHMARKS: [PolicySpec; 6] = [
        PolicySpec::AdaEtc,
        PolicySpec::NadaEtc,
        PolicySpec::Succ,
        PolicySpec::Etc,
        PolicySpec::Ucb1,
        PolicySpec::Ucb1S,
    ];

    /// Replaces `oracle:best` by the instance's best arm.
    pub fn resolve(self, instance: &BanditInstance) -> Result<Self> {
        match self {
            PolicySpec::Oracle(OracleTarget::Best) => {
                Ok(PolicySpec::Oracle(OracleTarget::Arm(instance.best_arm())))
            }
            PolicySpec::Oracle(OracleTarget::Arm(i)) if i >= instance.num_arms() => {
                Err(Error::ArmOutOfRange {
                    index: i,
                    arms: instance.num_arms(),
                })
            }
            other => Ok(other),
        }
    }

    fn confidence_driven(self) -> bool {
        matches!(
            self,
            PolicySpec::AdaEtc | PolicySpec::NadaEtc | PolicySpec::Ucb1S
        )
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::AdaEtc => f.write_str("ada-etc"),
            PolicySpec::NadaEtc => f.write_str("nada-etc"),
            PolicySpec::Succ => f.write_str("succ"),
            PolicySpec::Etc => f.write_str("etc"),
            PolicySpec::Ucb1 => f.write_str("ucb1"),
            PolicySpec::Ucb1S => f.write_str("ucb1-s"),
            PolicySpec::Oracle(OracleTarget::Best) => f.write_str("oracle:best"),
            PolicySpec::Oracle(OracleTarget::Arm(i)) => write!(f, "oracle:{i}"),
        }
    }
}

impl FromStr for PolicySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec = match s.trim().to_ascii_lowercase().as_str() {
            "ada-etc" => PolicySpec::AdaEtc,
            "nada-etc" => PolicySpec::NadaEtc,
            "succ" => PolicySpec::Succ,
            "etc" => PolicySpec::Etc,
            "ucb1" => PolicySpec::Ucb1,
            "ucb1-s" => PolicySpec::Ucb1S,
            "oracle:best" => PolicySpec::Oracle(OracleTarget::Best),
            other => match other.strip_prefix("oracle:").map(str::parse::<usize>) {
                Some(Ok(arm)) => PolicySpec::Oracle(OracleTarget::Arm(arm)),
                _ => return Err(Error::InvalidPolicy(s.to_string())),
            },
        };
        Ok(spec)
    }
}

impl Serialize for PolicySpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PolicySpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    ExploreInit,
    Explore,
    Commit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    Pull(usize),
    CommitTo(usize),
}

/// Mutable per-episode state of one policy.
#[derive(Debug, Clone)]
pub struct PolicyState {
    spec: PolicySpec,
    arms: usize,
    horizon: u64,
    tau: u64,
    pull_counts: Vec<u64>,
    reward_sums: Vec<f64>,
    phase: Phase,
    committed_arm: Option<usize>,
    commit_time: Option<u64>,
    total_pulls: u64,
    succ_active: Option<Vec<bool>>,
    succ_round: Option<u64>,
    // Cached constants of the confidence indices.
    horizon_per_arm: f64,
    log_horizon: f64,
}

impl PolicyState {
    /// Fresh state for a `arms`-armed episode of length `horizon`.
    ///
    /// `oracle:best` must be resolved against an instance first.
    pub fn new(spec: PolicySpec, arms: usize, horizon: u64) -> Result<Self> {
        if arms == 0 {
            return Err(Error::EmptyInstance);
        }
        let tau = if arms == 1 {
            // single arm: commits at t=1, tau is informational
            exploration_budget(horizon.max(1), 1)
        } else {
            tau(horizon, arms)?
        };
        match spec {
            PolicySpec::Oracle(OracleTarget::Best) => {
                return Err(Error::InvalidPolicy(
                    "oracle:best must be resolved against an instance".into(),
                ))
            }
            PolicySpec::Oracle(OracleTarget::Arm(i)) if i >= arms => {
                return Err(Error::ArmOutOfRange { index: i, arms })
            }
            _ => {}
        }
        let succ = spec == PolicySpec::Succ;
        Ok(PolicyState {
            spec,
            arms,
            horizon,
            tau,
            pull_counts: vec![0; arms],
            reward_sums: vec![0.0; arms],
            phase: Phase::ExploreInit,
            committed_arm: None,
            commit_time: None,
            total_pulls: 0,
            succ_active: succ.then(|| vec![true; arms]),
            succ_round: succ.then_some(0),
            horizon_per_arm: horizon as f64 / arms as f64,
            log_horizon: (horizon as f64).ln(),
        })
    }

    pub fn spec(&self) -> PolicySpec {
        self.spec
    }

    pub fn num_arms(&self) -> usize {
        self.arms
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }

    pub fn pull_counts(&self) -> &[u64] {
        &self.pull_counts
    }

    pub fn reward_sums(&self) -> &[f64] {
        &self.reward_sums
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn committed_arm(&self) -> Option<usize> {
        self.committed_arm
    }

    /// Pulls made before the commit decision.
    pub fn commit_time(&self) -> Option<u64> {
        self.commit_time
    }

    pub fn total_pulls(&self) -> u64 {
        self.total_pulls
    }

    pub fn succ_active_set(&self) -> Option<Vec<usize>> {
        self.succ_active
            .as_ref()
            .map(|a| (0..self.arms).filter(|&i| a[i]).collect())
    }

    pub fn succ_round(&self) -> Option<u64> {
        self.succ_round
    }

    pub fn empirical_mean(&self, arm: usize) -> f64 {
        match self.pull_counts[arm] {
            0 => 0.0,
            n => self.reward_sums[arm] / n as f64,
        }
    }

    /// Decides the next action. In the Commit phase this is always a pull of
    /// the committed arm.
    pub fn select_arm(&self) -> Result<Action> {
        if self.total_pulls >= self.horizon {
            return Err(Error::HorizonExhausted(self.horizon));
        }
        if let Some(arm) = self.committed_arm {
            return Ok(Action::Pull(arm));
        }
        let commits = !matches!(self.spec, PolicySpec::Ucb1 | PolicySpec::Oracle(_));
        if self.arms == 1 && commits {
            return Ok(Action::CommitTo(0));
        }
        match self.spec {
            PolicySpec::Oracle(OracleTarget::Arm(arm)) => Ok(Action::Pull(arm)),
            PolicySpec::Oracle(OracleTarget::Best) => unreachable!("rejected in new()"),
            PolicySpec::Etc => Ok(self.select_etc()),
            PolicySpec::Succ => Ok(self.select_succ()),
            PolicySpec::Ucb1 => Ok(self.select_ucb1()),
            PolicySpec::AdaEtc | PolicySpec::NadaEtc | PolicySpec::Ucb1S => {
                Ok(self.select_confidence())
            }
        }
    }

    fn first_unpulled(&self) -> Option<usize> {
        self.pull_counts.iter().position(|&n| n == 0)
    }

    fn empirical_best(&self, candidates: impl Iterator<Item = usize>) -> usize {
        let mut best: Option<(usize, f64)> = None;
        for i in candidates {
            let m = self.empirical_mean(i);
            if best.is_none_or(|(_, b)| m > b) {
                best = Some((i, m));
            }
        }
        best.map(|(i, _)| i).unwrap_or(0)
    }

    fn select_etc(&self) -> Action {
        let mut next = 0;
        for i in 1..self.arms {
            if self.pull_counts[i] < self.pull_counts[next] {
                next = i;
            }
        }
        if self.pull_counts[next] >= self.tau {
            Action::CommitTo(self.empirical_best(0..self.arms))
        } else {
            Action::Pull(next)
        }
    }

    fn select_ucb1(&self) -> Action {
        if let Some(i) = self.first_unpulled() {
            return Action::Pull(i);
        }
        let mut best = (0, f64::NEG_INFINITY);
        for i in 0..self.arms {
            let idx = self.empirical_mean(i) + ucb1_bonus(self.pull_counts[i], self.log_horizon);
            if idx > best.1 {
                best = (i, idx);
            }
        }
        Action::Pull(best.0)
    }

    /// Upper and lower confidence bounds of `arm` (which has been pulled).
    #[inline]
    fn confidence_bounds(&self, arm: usize) -> (f64, f64) {
        let n = self.pull_counts[arm];
        let mu = self.reward_sums[arm] / n as f64;
        let exploring = n < self.tau;
        match self.spec {
            PolicySpec::AdaEtc => {
                let ucb = ada_ucb_unchecked(mu, n, self.horizon_per_arm, self.tau);
                (ucb, if exploring { 0.0 } else { mu })
            }
            PolicySpec::NadaEtc => {
                if exploring {
                    (mu + ucb1_bonus(n, self.log_horizon), 0.0)
                } else {
                    (mu, mu)
                }
            }
            PolicySpec::Ucb1S => {
                if exploring {
                    let b = ucb1_bonus(n, self.log_horizon);
                    (mu + b, mu - b)
                } else {
                    (mu, mu)
                }
            }
            _ => unreachable!("not a confidence-driven policy"),
        }
    }

    fn select_confidence(&self) -> Action {
        debug_assert!(self.spec.confidence_driven());
        if let Some(i) = self.first_unpulled() {
            return Action::Pull(i);
        }
        // leader by LCB, explorer by UCB, and the runner-up UCB so the
        // stopping test can exclude the leader itself
        let mut leader = (0, f64::NEG_INFINITY);
        let mut top_ucb = (usize::MAX, f64::NEG_INFINITY);
        let mut second_ucb = f64::NEG_INFINITY;
        for i in 0..self.arms {
            let (ucb, lcb) = self.confidence_bounds(i);
            if lcb > leader.1 {
                leader = (i, lcb);
            }
            if ucb > top_ucb.1 {
                second_ucb = top_ucb.1;
                top_ucb = (i, ucb);
            } else if ucb > second_ucb {
                second_ucb = ucb;
            }
        }
        let max_other_ucb = if top_ucb.0 == leader.0 {
            second_ucb
        } else {
            top_ucb.1
        };
        if leader.1 > max_other_ucb {
            return Action::CommitTo(leader.0);
        }
        let explorer = top_ucb.0;
        if self.pull_counts[explorer] >= self.tau {
            // Exact ties can leave every index collapsed without the strict
            // test firing; an explorer at tau pulls means the leader wins.
            return Action::CommitTo(leader.0);
        }
        Action::Pull(explorer)
    }

    fn succ_delta(&self) -> f64 {
        (self.arms as f64 / self.horizon as f64).cbrt()
    }

    /// Successive-elimination confidence radius after `n` pulls per arm.
    pub fn succ_radius(&self, n: u64) -> f64 {
        let nf = n as f64;
        ((4.0 * self.arms as f64 * nf * nf / self.succ_delta()).ln() / (2.0 * nf)).sqrt()
    }

    fn select_succ(&self) -> Action {
        let active = self.succ_active.as_ref().expect("succ state");
        let round = self.succ_round.unwrap_or(0);
        let survivors = active.iter().filter(|&&a| a).count();
        if survivors == 1 {
            return Action::CommitTo(active.iter().position(|&a| a).unwrap());
        }
        if round >= self.tau {
            return Action::CommitTo(self.empirical_best((0..self.arms).filter(|&i| active[i])));
        }
        let next = (0..self.arms)
            .find(|&i| active[i] && self.pull_counts[i] <= round)
            .expect("an active arm is due in an unfinished round");
        Action::Pull(next)
    }

    /// Enters the Commit phase on `arm`.
    pub fn commit(&mut self, arm: usize) -> Result<()> {
        if arm >= self.arms {
            return Err(Error::ArmOutOfRange {
                index: arm,
                arms: self.arms,
            });
        }
        if self.committed_arm.is_none() {
            self.committed_arm = Some(arm);
            self.commit_time = Some(self.total_pulls);
            self.phase = Phase::Commit;
        }
        Ok(())
    }

    /// Records `reward` from a pull of `arm`.
    pub fn observe(&mut self, arm: usize, reward: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&reward) {
            return Err(Error::RewardOutOfRange(reward));
        }
        if arm >= self.arms {
            return Err(Error::ArmOutOfRange {
                index: arm,
                arms: self.arms,
            });
        }
        if self.total_pulls >= self.horizon {
            return Err(Error::HorizonExhausted(self.horizon));
        }
        self.pull_counts[arm] += 1;
        self.reward_sums[arm] += reward;
        self.total_pulls += 1;
        if self.phase == Phase::ExploreInit && self.pull_counts.iter().all(|&n| n > 0) {
            self.phase = Phase::Explore;
        }
        if self.phase != Phase::Commit && self.spec == PolicySpec::Succ {
            self.finish_succ_round();
        }
        Ok(())
    }

    fn finish_succ_round(&mut self) {
        let round = self.succ_round.unwrap_or(0);
        let active = self.succ_active.as_ref().expect("succ state");
        let complete = (0..self.arms)
            .filter(|&i| active[i])
            .all(|i| self.pull_counts[i] > round);
        if !complete {
            return;
        }
        let n = round + 1;
        let best = (0..self.arms)
            .filter(|&i| active[i])
            .map(|i| self.empirical_mean(i))
            .fold(f64::NEG_INFINITY, f64::max);
        let threshold = 2.0 * self.succ_radius(n);
        let means: Vec<f64> = (0..self.arms).map(|i| self.empirical_mean(i)).collect();
        let active = self.succ_active.as_mut().expect("succ state");
        for (i, a) in active.iter_mut().enumerate() {
            if *a && best - means[i] > threshold {
                *a = false;
            }
        }
        self.succ_round = Some(n);
    }
}

/// Free-function form of [`PolicyState::select_arm`].
pub fn select_arm(state: &PolicyState) -> Result<Action> {
    state.select_arm()
}

/// Free-function form of [`PolicyState::observe`].
pub fn observe(state: &mut PolicyState, arm: usize, reward: f64) -> Result<()> {
    state.observe(arm, reward)
}
