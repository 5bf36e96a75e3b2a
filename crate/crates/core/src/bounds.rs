//! Numeric evaluation of the regret bounds for the max objective: Bernoulli
//! KL divergence and KL-inf, the asymptotic instance-dependent lower bound,
//! the minimax hard pair, and the finite-horizon ADA-ETC upper bound.

use serde::{Deserialize, Serialize};

use crate::bandit::BanditInstance;
use crate::error::{Error, Result};
use crate::policies::{log_plus, tau};

/// KL divergence between Bernoulli(p) and Bernoulli(q), in nats.
///
/// Uses `0 log 0 = 0` and returns `+inf` when `q` is 0 or 1 and `p != q`.
pub fn kl_bernoulli(p: f64, q: f64) -> f64 {
    if p == q {
        return 0.0;
    }
    if q <= 0.0 || q >= 1.0 {
        return f64::INFINITY;
    }
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    term(p, q) + term(1.0 - p, 1.0 - q)
}

/// KL-inf of a Bernoulli arm with mean `mu_i` against means above `mu_star`,
/// within the Bernoulli family.
///
/// KL is increasing in `q` beyond `mu_i`, so the infimum over `q > mu_star`
/// is attained as `q -> mu_star`.
pub fn d_inf_bernoulli(mu_i: f64, mu_star: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu_i) || !(0.0..=1.0).contains(&mu_star) || mu_i > mu_star {
        return Err(Error::DomainError(format!(
            "need 0 <= mu_i <= mu_star <= 1, got mu_i={mu_i}, mu_star={mu_star}"
        )));
    }
    if mu_i == mu_star {
        return Ok(0.0);
    }
    if mu_star >= 1.0 {
        return Err(Error::DomainError(
            "no Bernoulli law has mean above 1".into(),
        ));
    }
    Ok(kl_bernoulli(mu_i, mu_star))
}

/// Coefficient of `log T` in the asymptotic lower bound:
/// `sum over i != k* of mu* / d_inf(mu_i, mu*)`.
pub fn lower_bound_coeff(instance: &BanditInstance) -> Result<f64> {
    if !instance.unique_best() {
        return Err(Error::NonUniqueOptimum);
    }
    if let Some(i) = instance.arms().iter().position(|a| !a.is_bernoulli()) {
        return Err(Error::NotBernoulli(i));
    }
    let best = instance.best_arm();
    let mu_star = instance.best_mean();
    let mut total = 0.0;
    for (i, &mu) in instance.means().iter().enumerate() {
        if i == best {
            continue;
        }
        let d = d_inf_bernoulli(mu, mu_star)?;
        total += if d == 0.0 { f64::INFINITY } else { mu_star / d };
    }
    Ok(total)
}

/// Asymptotic instance-dependent lower bound `log(T) * lower_bound_coeff`.
pub fn instance_lower_bound(instance: &BanditInstance, horizon: f64) -> Result<f64> {
    let coeff = lower_bound_coeff(instance)?;
    if coeff == 0.0 {
        return Ok(0.0);
    }
    Ok(horizon.ln() * coeff)
}

/// The two nearly indistinguishable environments of the minimax argument.
#[derive(Debug, Clone, PartialEq)]
pub struct HardPair {
    pub base: BanditInstance,
    pub perturbed: BanditInstance,
    pub delta: f64,
}

/// Builds `nu = (1/2 + D, 1/2, ..., 1/2)` and `nu'`, equal to `nu` except
/// that the last arm has mean `1/2 + 2D`, with `D = (K-1)^(1/3) / (2 T^(1/3))`.
pub fn minimax_hard_pair(arms: usize, horizon: u64) -> Result<HardPair> {
    if arms < 2 || arms as u64 >= horizon {
        return Err(Error::InvalidHorizon { horizon, arms });
    }
    let delta = ((arms - 1) as f64).cbrt() / (2.0 * (horizon as f64).cbrt());
    if delta >= 0.25 {
        return Err(Error::DeltaTooLarge(delta));
    }
    let mut means = vec![0.5; arms];
    means[0] = 0.5 + delta;
    let base = BanditInstance::bernoulli(&means)?;
    means[arms - 1] = 0.5 + 2.0 * delta;
    let perturbed = BanditInstance::bernoulli(&means)?;
    Ok(HardPair {
        base,
        perturbed,
        delta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperBoundTerms {
    /// Wasted explore pulls driven by the confidence bounds.
    pub explore_adaptive: f64,
    /// Explore pulls after a failed tail event.
    pub explore_tail: f64,
    /// Misidentification after a full tau-pull comparison.
    pub commit_hoeffding: f64,
    /// Misidentification from stopping early, summed over gap steps.
    pub commit_gapstep: f64,
}

impl UpperBoundTerms {
    pub fn total(&self) -> f64 {
        self.explore_adaptive + self.explore_tail + self.commit_hoeffding + self.commit_gapstep
    }
}

/// Upper-bound constant of the explore-tail term.
pub const EXPLORE_TAIL_CONSTANT: f64 = 648.0;
/// Upper-bound constant of the early-stopping misidentification term.
pub const GAPSTEP_CONSTANT: f64 = 320.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// `sum mu*/d_inf`, when the instance admits it; `None` otherwise.
    pub lower_bound_coeff: Option<f64>,
    pub upper_bound: f64,
    pub upper_terms: UpperBoundTerms,
    pub tau: u64,
    #[serde(rename = "T")]
    pub horizon: u64,
}

/// Finite-horizon upper bound on the expected regret of ADA-ETC.
///
/// Arms are relabeled internally by descending mean.
pub fn ada_etc_upper_bound(instance: &BanditInstance, horizon: u64) -> Result<UpperBoundTerms> {
    if !instance.unique_best() {
        return Err(Error::NonUniqueOptimum);
    }
    let k = instance.num_arms();
    if k == 1 {
        return Ok(UpperBoundTerms {
            explore_adaptive: 0.0,
            explore_tail: 0.0,
            commit_hoeffding: 0.0,
            commit_gapstep: 0.0,
        });
    }
    let tau_f = tau(horizon, k)? as f64;
    let t = horizon as f64;
    let kf = k as f64;
    let mu1 = instance.best_mean();
    let gaps = instance.sorted_view().sorted_gaps;

    let mut terms = UpperBoundTerms {
        explore_adaptive: 0.0,
        explore_tail: 0.0,
        commit_hoeffding: 0.0,
        commit_gapstep: 0.0,
    };
    for i in 1..k {
        let d = gaps[i];
        let d2 = d * d;
        let d3 = d2 * d;
        let lp = log_plus(t * d3 / kf);
        let adaptive = 10.0 / d2 + 16.0 / d2 * lp + 24.0 / d2 * lp.sqrt();
        terms.explore_adaptive += adaptive.min(tau_f);
        terms.explore_tail += (EXPLORE_TAIL_CONSTANT * kf / (t * d3)).min(2.0);
        terms.commit_hoeffding += (-tau_f * d2 / 2.0).exp() * t * d;
        terms.commit_gapstep += (GAPSTEP_CONSTANT * kf / (t * d3)).min(1.0) * t * (d - gaps[i - 1]);
    }
    terms.explore_adaptive *= mu1;
    terms.explore_tail *= mu1 * tau_f;
    Ok(terms)
}

/// Lower-bound coefficient (when defined) and itemized upper bound.
pub fn bound_report(instance: &BanditInstance, horizon: u64) -> Result<BoundReport> {
    let upper_terms = ada_etc_upper_bound(instance, horizon)?;
    let lower_bound_coeff = match lower_bound_coeff(instance) {
        Ok(c) => Some(c),
        Err(Error::NotBernoulli(_)) | Err(Error::DomainError(_)) => None,
        Err(e) => return Err(e),
    };
    let tau = if instance.num_arms() == 1 {
        tau(horizon, 1).unwrap_or(1)
    } else {
        tau(horizon, instance.num_arms())?
    };
    Ok(BoundReport {
        lower_bound_coeff,
        upper_bound: upper_terms.total(),
        upper_terms,
        tau,
        horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kl_examples() {
        assert_eq!(kl_bernoulli(0.5, 0.5), 0.0);
        assert_abs_diff_eq!(kl_bernoulli(0.5, 0.75), 0.5 * (4.0f64 / 3.0).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(kl_bernoulli(0.5, 0.75), 0.14384, epsilon = 1e-5);
        assert_eq!(kl_bernoulli(0.3, 1.0), f64::INFINITY);
        assert_eq!(kl_bernoulli(0.3, 0.0), f64::INFINITY);
        assert_eq!(kl_bernoulli(1.0, 1.0), 0.0);
        assert_abs_diff_eq!(kl_bernoulli(0.0, 0.5), 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn d_inf_examples() {
        assert_eq!(d_inf_bernoulli(0.5, 0.5).unwrap(), 0.0);
        assert_abs_diff_eq!(d_inf_bernoulli(0.5, 0.75).unwrap(), 0.14384, epsilon = 1e-5);
        assert!(d_inf_bernoulli(0.5, 1.0).is_err());
        assert!(d_inf_bernoulli(0.8, 0.5).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        let one = BanditInstance::bernoulli(&[0.4]).unwrap();
        assert_eq!(instance_lower_bound(&one, 1000.0).unwrap(), 0.0);

        let two = BanditInstance::bernoulli(&[0.75, 0.5]).unwrap();
        let v = instance_lower_bound(&two, std::f64::consts::E).unwrap();
        assert_abs_diff_eq!(v, 0.75 / (0.5 * (4.0f64 / 3.0).ln()), epsilon = 1e-12);
        assert_abs_diff_eq!(v, 5.214, epsilon = 1e-3);

        let tie = BanditInstance::bernoulli(&[0.5, 0.5]).unwrap();
        assert!(matches!(
            instance_lower_bound(&tie, 10.0),
            Err(Error::NonUniqueOptimum)
        ));
    }

    #[test]
    fn hard_pair_examples() {
        let pair = minimax_hard_pair(2, 1000).unwrap();
        assert_abs_diff_eq!(pair.delta, 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(pair.base.means()[0], 0.55, epsilon = 1e-15);
        assert_eq!(pair.base.means()[1], 0.5);
        assert_abs_diff_eq!(pair.perturbed.means()[1], 0.6, epsilon = 1e-15);

        assert!(matches!(minimax_hard_pair(2, 8), Err(Error::DeltaTooLarge(_))));

        let pair = minimax_hard_pair(9, 1000).unwrap();
        assert_abs_diff_eq!(pair.delta, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(pair.perturbed.means()[8], 0.7, epsilon = 1e-15);
    }

    #[test]
    fn hard_pair_kl_closed_form() {
        // KL(1/2, 1/2 + 2D) = -ln(1 - 16 D^2) / 2 = 8 D^2 + 64 D^4 + ...,
        // so it sits just above 8 D^2 and below the chi-square bound
        // 4 D^2 / (q (1 - q)).
        for t in [30u64, 100, 1000, 10_000, 1_000_000] {
            for k in [2usize, 3, 5, 10] {
                if let Ok(pair) = minimax_hard_pair(k, t) {
                    let d = pair.delta;
                    let q = 0.5 + 2.0 * d;
                    let kl = kl_bernoulli(0.5, q);
                    assert_abs_diff_eq!(kl, -(1.0 - 16.0 * d * d).ln() / 2.0, epsilon = 1e-14);
                    assert!(kl > 8.0 * d * d);
                    assert!(kl <= 4.0 * d * d / (q * (1.0 - q)));
                }
            }
        }
    }

    #[test]
    fn upper_bound_single_arm_is_zero() {
        let inst = BanditInstance::bernoulli(&[0.3]).unwrap();
        let r = bound_report(&inst, 100).unwrap();
        assert_eq!(r.upper_bound, 0.0);
        assert_eq!(r.lower_bound_coeff, Some(0.0));
    }

    #[test]
    fn upper_bound_clamps_at_tau() {
        // mu_1 = 1, gap 1, T = 1000, K = 2: tau = ceil(500^(2/3)) = 63 and the
        // adaptive expression 10 + 16 ln 500 + 24 sqrt(ln 500) ~ 169.26 exceeds it
        let inst = BanditInstance::bernoulli(&[1.0, 0.0]).unwrap();
        let terms = ada_etc_upper_bound(&inst, 1000).unwrap();
        let raw = 10.0 + 16.0 * 500f64.ln() + 24.0 * 500f64.ln().sqrt();
        assert_abs_diff_eq!(raw, 169.2636, epsilon = 1e-4);
        assert_eq!(tau(1000, 2).unwrap(), 63);
        assert_eq!(terms.explore_adaptive, 63.0);
        // min(2, 648*2/1000) = 1.296, times mu_1 tau
        assert_abs_diff_eq!(terms.explore_tail, 1.296 * 63.0, epsilon = 1e-9);
        assert_abs_diff_eq!(terms.commit_hoeffding, (-31.5f64).exp() * 1000.0, epsilon = 1e-15);
        assert_abs_diff_eq!(terms.commit_gapstep, 0.64 * 1000.0, epsilon = 1e-9);
    }

    #[test]
    fn upper_bound_uses_sorted_gap_steps() {
        let inst = BanditInstance::bernoulli(&[0.2, 0.9, 0.5]).unwrap();
        let a = ada_etc_upper_bound(&inst, 500).unwrap();
        let b = ada_etc_upper_bound(&BanditInstance::bernoulli(&[0.9, 0.5, 0.2]).unwrap(), 500).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            ada_etc_upper_bound(&BanditInstance::bernoulli(&[0.9, 0.9]).unwrap(), 500),
            Err(Error::NonUniqueOptimum)
        ));
    }
}
