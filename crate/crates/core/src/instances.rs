//! Random instance generation and named fixture instances.

use serde::{Deserialize, Serialize};

use crate::bandit::{ArmDistribution, BanditInstance};
use crate::bounds::minimax_hard_pair;
use crate::error::{Error, Result};
use crate::rng::uniform_at;

/// Parameters of a set of random Bernoulli instances with means drawn
/// uniformly from `[alpha, 1 - alpha]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(rename = "K")]
    pub arms: usize,
    pub alpha: f64,
    pub n_instances: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..0.5).contains(&self.alpha) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        if self.arms == 0 {
            return Err(Error::EmptyInstance);
        }
        Ok(())
    }
}

/// Mean of arm `arm` in instance `index`; depends only on `(seed, index, arm)`.
pub fn uniform_mean(seed: u64, alpha: f64, index: u64, arm: u64) -> f64 {
    let u = uniform_at(seed, index, arm);
    alpha + (1.0 - 2.0 * alpha) * u
}

pub fn gen_uniform(spec: &GenSpec) -> Result<Vec<BanditInstance>> {
    spec.validate()?;
    (0..spec.n_instances as u64)
        .map(|index| {
            let arms = (0..spec.arms as u64)
                .map(|arm| ArmDistribution::bernoulli(uniform_mean(spec.seed, spec.alpha, index, arm)))
                .collect();
            BanditInstance::new(arms)
        })
        .collect()
}

/// Fixture names understood by [`fixture`].
pub const FIXTURE_NAMES: [&str; 5] = [
    "fig1",
    "equal-deterministic[:<K>]",
    "two-arm-gap:<delta>",
    "hard-pair-a:<K>:<T>",
    "hard-pair-b:<K>:<T>",
];

/// Named instances from the motivating examples:
///
/// * `fig1`: two Bernoulli(0.5) arms.
/// * `equal-deterministic[:K]`: K (default 2) arms that always pay 1.
/// * `two-arm-gap:D`: Bernoulli(0.5 + D) and Bernoulli(0.5).
/// * `hard-pair-a:K:T` / `hard-pair-b:K:T`: the two minimax environments.
pub fn fixture(name: &str) -> Result<BanditInstance> {
    let unknown = || Error::UnknownFixture(name.to_string());
    let mut parts = name.trim().split(':');
    let head = parts.next().ok_or_else(unknown)?;
    let args: Vec<&str> = parts.collect();
    let int = |s: &str| s.parse::<u64>().map_err(|_| unknown());
    match (head, args.as_slice()) {
        ("fig1", []) => BanditInstance::bernoulli(&[0.5, 0.5]),
        ("equal-deterministic", []) => {
            BanditInstance::new(vec![ArmDistribution::deterministic(1.0); 2])
        }
        ("equal-deterministic", [k]) => {
            BanditInstance::new(vec![ArmDistribution::deterministic(1.0); int(k)? as usize])
        }
        ("two-arm-gap", [d]) => {
            let d: f64 = d.parse().map_err(|_| unknown())?;
            BanditInstance::bernoulli(&[0.5 + d, 0.5])
        }
        ("hard-pair-a", [k, t]) => Ok(minimax_hard_pair(int(k)? as usize, int(t)?)?.base),
        ("hard-pair-b", [k, t]) => Ok(minimax_hard_pair(int(k)? as usize, int(t)?)?.perturbed),
        _ => Err(unknown()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_bounds_means() {
        let spec = GenSpec {
            arms: 5,
            alpha: 0.4,
            n_instances: 200,
            seed: 1,
        };
        for inst in gen_uniform(&spec).unwrap() {
            assert!(inst.means().iter().all(|&m| (0.4..=0.6).contains(&m)));
        }
        let spec = GenSpec { alpha: 0.0, ..spec };
        for inst in gen_uniform(&spec).unwrap() {
            assert!(inst.means().iter().all(|&m| (0.0..=1.0).contains(&m)));
        }
    }

    #[test]
    fn generation_is_deterministic_and_prefix_stable() {
        let spec = GenSpec {
            arms: 3,
            alpha: 0.0,
            n_instances: 20,
            seed: 99,
        };
        assert_eq!(gen_uniform(&spec).unwrap(), gen_uniform(&spec).unwrap());
        // arm j's mean does not depend on K
        let wider = gen_uniform(&GenSpec { arms: 7, ..spec }).unwrap();
        for (a, b) in gen_uniform(&spec).unwrap().iter().zip(&wider) {
            assert_eq!(a.means(), &b.means()[..3]);
        }
    }

    #[test]
    fn rejects_bad_alpha() {
        let spec = GenSpec {
            arms: 2,
            alpha: 0.5,
            n_instances: 1,
            seed: 0,
        };
        assert!(matches!(gen_uniform(&spec), Err(Error::InvalidAlpha(_))));
    }

    #[test]
    fn means_pass_ks_uniformity() {
        // 100k draws; 1% critical value of the KS statistic is ~1.628/sqrt(n)
        let mut xs: Vec<f64> = (0..1000u64)
            .flat_map(|i| (0..100u64).map(move |j| uniform_mean(2024, 0.0, i, j)))
            .collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
            .fold(0.0, f64::max);
        assert!(d < 1.628 / n.sqrt(), "KS D = {d}");
    }

    #[test]
    fn fixtures() {
        assert_eq!(fixture("fig1").unwrap().means(), &[0.5, 0.5]);
        let gap = fixture("two-arm-gap:0.2").unwrap();
        assert!((gap.means()[0] - 0.7).abs() < 1e-15);
        assert_eq!(gap.means()[1], 0.5);
        let hp = fixture("hard-pair-a:2:1000").unwrap();
        assert!((hp.means()[0] - 0.55).abs() < 1e-15);
        assert_eq!(hp.means()[1], 0.5);
        let hp = fixture("hard-pair-b:2:1000").unwrap();
        assert!((hp.means()[1] - 0.6).abs() < 1e-15);
        assert_eq!(fixture("equal-deterministic:4").unwrap().num_arms(), 4);
        assert!(matches!(fixture("nope"), Err(Error::UnknownFixture(_))));
        assert!(matches!(fixture("two-arm-gap:x"), Err(Error::UnknownFixture(_))));
        assert!(fixture("two-arm-gap:0.7").is_err());
    }
}
