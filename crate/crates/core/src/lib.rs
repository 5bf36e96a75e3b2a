//! Simulation toolkit for the stochastic multi-armed bandit under the
//! max-of-cumulative-rewards objective.
//!
//! The regret of a policy here is `mu_max * T - E[max_i U_i(T)]`, where
//! `U_i(T)` is the cumulative reward collected from arm `i` by time `T`.
//! Always pulling the best arm is optimal, so pure exploration is wasted
//! reward and a good policy must eventually commit to one arm.
//!
//! * [`bandit`]: instances, episode results, regret estimates.
//! * [`policies`]: ADA-ETC, NADA-ETC, SUCC, ETC, UCB1, UCB1-s and an oracle.
//! * [`engine`]: seeded episodes and Monte-Carlo regret estimation.
//! * [`bounds`]: KL quantities, lower bounds and the ADA-ETC upper bound.
//! * [`instances`]: random instance sets and named fixtures.
//! * [`report`]: experiment sweeps, CSV and SVG output.

pub mod bandit;
pub mod bounds;
pub mod engine;
pub mod error;
pub mod instances;
pub mod policies;
pub mod report;
pub mod rng;

pub use bandit::{
    make_instance, sorted_view, ArmDistribution, BanditInstance, EpisodeResult, RegretEstimate,
    SortedView, TraceStep,
};
pub use bounds::{
    ada_etc_upper_bound, bound_report, d_inf_bernoulli, instance_lower_bound, kl_bernoulli,
    lower_bound_coeff, minimax_hard_pair, BoundReport, HardPair, UpperBoundTerms,
};
pub use engine::{compare_policies, estimate_regret, run_episode, run_episode_traced, RunPlan};
pub use error::{Error, Result};
pub use instances::{fixture, gen_uniform, GenSpec};
pub use policies::{
    adaetc_lcb, adaetc_ucb, tau, ucb1_index, Action, OracleTarget, Phase, PolicySpec, PolicyState,
};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MAXBANDIT_THREADS";

/// Runs `f` on a dedicated pool of `threads` workers. Results never depend
/// on the thread count.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}
