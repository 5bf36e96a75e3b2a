//! Python bindings: instances, policies, episode simulation, regret
//! estimation and bound evaluators.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use maxbandit as mb;

fn to_py(err: mb::Error) -> PyErr {
    if err.is_validation() {
        PyValueError::new_err(err.to_string())
    } else {
        PyRuntimeError::new_err(err.to_string())
    }
}

fn parse_policy(name: &str) -> PyResult<mb::PolicySpec> {
    name.parse().map_err(to_py)
}

fn parse_arm(kind: &str, param: f64) -> PyResult<mb::ArmDistribution> {
    match kind.to_ascii_lowercase().as_str() {
        "bernoulli" => Ok(mb::ArmDistribution::bernoulli(param)),
        "deterministic" => Ok(mb::ArmDistribution::deterministic(param)),
        other => Err(PyValueError::new_err(format!("unknown arm kind `{other}`"))),
    }
}

#[pyclass(name = "BanditInstance", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyBanditInstance {
    inner: mb::BanditInstance,
}

#[pymethods]
impl PyBanditInstance {
    /// `arms` is a list of `(kind, parameter)` pairs with kind
    /// `"bernoulli"` or `"deterministic"`.
    #[new]
    fn new(arms: Vec<(String, f64)>) -> PyResult<Self> {
        let arms = arms
            .iter()
            .map(|(kind, p)| parse_arm(kind, *p))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyBanditInstance {
            inner: mb::make_instance(arms).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn bernoulli(means: Vec<f64>) -> PyResult<Self> {
        Ok(PyBanditInstance {
            inner: mb::BanditInstance::bernoulli(&means).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyBanditInstance { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("instance serializes")
    }

    #[getter]
    fn means(&self) -> Vec<f64> {
        self.inner.means().to_vec()
    }

    #[getter]
    fn gaps(&self) -> Vec<f64> {
        self.inner.gaps().to_vec()
    }

    #[getter]
    fn best_arm(&self) -> usize {
        self.inner.best_arm()
    }

    #[getter]
    fn unique_best(&self) -> bool {
        self.inner.unique_best()
    }

    #[getter]
    fn num_arms(&self) -> usize {
        self.inner.num_arms()
    }

    /// `(permutation, sorted_gaps)` with arms by descending mean.
    fn sorted_view(&self) -> (Vec<usize>, Vec<f64>) {
        let v = self.inner.sorted_view();
        (v.permutation, v.sorted_gaps)
    }

    fn __len__(&self) -> usize {
        self.inner.num_arms()
    }

    fn __repr__(&self) -> String {
        format!("BanditInstance({})", self.to_json())
    }
}

#[pyclass(name = "EpisodeResult", frozen, skip_from_py_object)]
pub struct PyEpisodeResult {
    inner: mb::EpisodeResult,
}

#[pymethods]
impl PyEpisodeResult {
    #[getter]
    fn pulls(&self) -> Vec<u64> {
        self.inner.pulls.clone()
    }

    #[getter]
    fn cum_rewards(&self) -> Vec<f64> {
        self.inner.cum_rewards.clone()
    }

    #[getter]
    fn max_cum_reward(&self) -> f64 {
        self.inner.max_cum_reward
    }

    #[getter]
    fn commit_time(&self) -> Option<u64> {
        self.inner.commit_time
    }

    #[getter]
    fn committed_arm(&self) -> Option<usize> {
        self.inner.committed_arm
    }

    /// List of `(time, arm, reward)`, or `None` when not recorded.
    #[getter]
    fn trace(&self) -> Option<Vec<(u64, usize, f64)>> {
        self.inner
            .trace
            .as_ref()
            .map(|t| t.iter().map(|s| (s.time, s.arm, s.reward)).collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "EpisodeResult(pulls={:?}, max_cum_reward={}, committed_arm={:?})",
            self.inner.pulls, self.inner.max_cum_reward, self.inner.committed_arm
        )
    }
}

#[pyclass(name = "RegretEstimate", frozen, get_all, skip_from_py_object)]
pub struct PyRegretEstimate {
    mean_regret: f64,
    stderr: f64,
    n_runs: u64,
    mean_max_reward: f64,
    oracle_reward: f64,
    mean_total_reward: f64,
}

impl From<mb::RegretEstimate> for PyRegretEstimate {
    fn from(e: mb::RegretEstimate) -> Self {
        PyRegretEstimate {
            mean_regret: e.mean_regret,
            stderr: e.stderr,
            n_runs: e.n_runs,
            mean_max_reward: e.mean_max_reward,
            oracle_reward: e.oracle_reward,
            mean_total_reward: e.mean_total_reward,
        }
    }
}

#[pymethods]
impl PyRegretEstimate {
    fn __repr__(&self) -> String {
        format!(
            "RegretEstimate(mean_regret={}, stderr={}, n_runs={})",
            self.mean_regret, self.stderr, self.n_runs
        )
    }
}

/// Step-by-step driver of one policy, for custom environments.
#[pyclass(name = "PolicyState", skip_from_py_object)]
pub struct PyPolicyState {
    inner: mb::PolicyState,
}

#[pymethods]
impl PyPolicyState {
    #[new]
    fn new(policy: &str, arms: usize, horizon: u64) -> PyResult<Self> {
        Ok(PyPolicyState {
            inner: mb::PolicyState::new(parse_policy(policy)?, arms, horizon).map_err(to_py)?,
        })
    }

    /// `("pull", arm)` or `("commit", arm)`.
    fn select_arm(&self) -> PyResult<(&'static str, usize)> {
        match self.inner.select_arm().map_err(to_py)? {
            mb::Action::Pull(i) => Ok(("pull", i)),
            mb::Action::CommitTo(i) => Ok(("commit", i)),
        }
    }

    fn commit(&mut self, arm: usize) -> PyResult<()> {
        self.inner.commit(arm).map_err(to_py)
    }

    fn observe(&mut self, arm: usize, reward: f64) -> PyResult<()> {
        self.inner.observe(arm, reward).map_err(to_py)
    }

    #[getter]
    fn tau(&self) -> u64 {
        self.inner.tau()
    }

    #[getter]
    fn pull_counts(&self) -> Vec<u64> {
        self.inner.pull_counts().to_vec()
    }

    #[getter]
    fn reward_sums(&self) -> Vec<f64> {
        self.inner.reward_sums().to_vec()
    }

    #[getter]
    fn phase(&self) -> &'static str {
        match self.inner.phase() {
            mb::Phase::ExploreInit => "explore-init",
            mb::Phase::Explore => "explore",
            mb::Phase::Commit => "commit",
        }
    }

    #[getter]
    fn committed_arm(&self) -> Option<usize> {
        self.inner.committed_arm()
    }
}

#[pyfunction]
fn tau(horizon: u64, arms: usize) -> PyResult<u64> {
    mb::tau(horizon, arms).map_err(to_py)
}

#[pyfunction]
fn adaetc_ucb(mu_bar: f64, n: u64, horizon: u64, arms: usize, tau: u64) -> PyResult<f64> {
    mb::adaetc_ucb(mu_bar, n, horizon, arms, tau).map_err(to_py)
}

#[pyfunction]
fn adaetc_lcb(mu_bar: f64, n: u64, tau: u64) -> PyResult<f64> {
    mb::adaetc_lcb(mu_bar, n, tau).map_err(to_py)
}

#[pyfunction]
fn ucb1_index(mu_bar: f64, n: u64, horizon: f64) -> PyResult<f64> {
    mb::ucb1_index(mu_bar, n, horizon).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (instance, policy, horizon, seed, keep_trace = false))]
fn run_episode(
    instance: &PyBanditInstance,
    policy: &str,
    horizon: u64,
    seed: u64,
    keep_trace: bool,
) -> PyResult<PyEpisodeResult> {
    let inner = mb::run_episode_traced(&instance.inner, parse_policy(policy)?, horizon, seed, keep_trace)
        .map_err(to_py)?;
    Ok(PyEpisodeResult { inner })
}

#[pyfunction]
#[pyo3(signature = (instance, policy, horizon, n_runs, seed = 0))]
fn estimate_regret(
    py: Python<'_>,
    instance: &PyBanditInstance,
    policy: &str,
    horizon: u64,
    n_runs: u64,
    seed: u64,
) -> PyResult<PyRegretEstimate> {
    let plan = mb::RunPlan::new(instance.inner.clone(), parse_policy(policy)?, horizon, n_runs).with_seed(seed);
    let est = py.detach(|| mb::estimate_regret(&plan)).map_err(to_py)?;
    Ok(est.into())
}

#[pyfunction]
#[pyo3(signature = (instance, policies, horizon, n_runs, seed = 0))]
fn compare_policies(
    py: Python<'_>,
    instance: &PyBanditInstance,
    policies: Vec<String>,
    horizon: u64,
    n_runs: u64,
    seed: u64,
) -> PyResult<Vec<PyRegretEstimate>> {
    let specs = policies
        .iter()
        .map(|p| parse_policy(p))
        .collect::<PyResult<Vec<_>>>()?;
    let inst = instance.inner.clone();
    let rows = py
        .detach(|| mb::compare_policies(&inst, &specs, horizon, n_runs, seed))
        .map_err(to_py)?;
    Ok(rows.into_iter().map(Into::into).collect())
}

#[pyfunction]
fn kl_bernoulli(p: f64, q: f64) -> f64 {
    mb::kl_bernoulli(p, q)
}

#[pyfunction]
fn d_inf_bernoulli(mu_i: f64, mu_star: f64) -> PyResult<f64> {
    mb::d_inf_bernoulli(mu_i, mu_star).map_err(to_py)
}

#[pyfunction]
fn instance_lower_bound(instance: &PyBanditInstance, horizon: f64) -> PyResult<f64> {
    mb::instance_lower_bound(&instance.inner, horizon).map_err(to_py)
}

/// Itemized ADA-ETC upper bound and lower-bound coefficient as a dict.
#[pyfunction]
fn bound_report<'py>(
    py: Python<'py>,
    instance: &PyBanditInstance,
    horizon: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = mb::bound_report(&instance.inner, horizon).map_err(to_py)?;
    let terms = PyDict::new(py);
    terms.set_item("explore_adaptive", r.upper_terms.explore_adaptive)?;
    terms.set_item("explore_tail", r.upper_terms.explore_tail)?;
    terms.set_item("commit_hoeffding", r.upper_terms.commit_hoeffding)?;
    terms.set_item("commit_gapstep", r.upper_terms.commit_gapstep)?;
    let d = PyDict::new(py);
    d.set_item("lower_bound_coeff", r.lower_bound_coeff)?;
    d.set_item("upper_bound", r.upper_bound)?;
    d.set_item("upper_terms", terms)?;
    d.set_item("tau", r.tau)?;
    d.set_item("T", r.horizon)?;
    Ok(d)
}

/// `(base, perturbed, delta)`.
#[pyfunction]
fn minimax_hard_pair(arms: usize, horizon: u64) -> PyResult<(PyBanditInstance, PyBanditInstance, f64)> {
    let pair = mb::minimax_hard_pair(arms, horizon).map_err(to_py)?;
    Ok((
        PyBanditInstance { inner: pair.base },
        PyBanditInstance {
            inner: pair.perturbed,
        },
        pair.delta,
    ))
}

#[pyfunction]
fn gen_uniform(arms: usize, alpha: f64, n_instances: usize, seed: u64) -> PyResult<Vec<PyBanditInstance>> {
    let spec = mb::GenSpec {
        arms,
        alpha,
        n_instances,
        seed,
    };
    Ok(mb::gen_uniform(&spec)
        .map_err(to_py)?
        .into_iter()
        .map(|inner| PyBanditInstance { inner })
        .collect())
}

#[pyfunction]
fn fixture(name: &str) -> PyResult<PyBanditInstance> {
    Ok(PyBanditInstance {
        inner: mb::fixture(name).map_err(to_py)?,
    })
}

#[pymodule]
pub fn maxbandit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBanditInstance>()?;
    m.add_class::<PyEpisodeResult>()?;
    m.add_class::<PyRegretEstimate>()?;
    m.add_class::<PyPolicyState>()?;
    m.add_function(wrap_pyfunction!(tau, m)?)?;
    m.add_function(wrap_pyfunction!(adaetc_ucb, m)?)?;
    m.add_function(wrap_pyfunction!(adaetc_lcb, m)?)?;
    m.add_function(wrap_pyfunction!(ucb1_index, m)?)?;
    m.add_function(wrap_pyfunction!(run_episode, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_regret, m)?)?;
    m.add_function(wrap_pyfunction!(compare_policies, m)?)?;
    m.add_function(wrap_pyfunction!(kl_bernoulli, m)?)?;
    m.add_function(wrap_pyfunction!(d_inf_bernoulli, m)?)?;
    m.add_function(wrap_pyfunction!(instance_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(bound_report, m)?)?;
    m.add_function(wrap_pyfunction!(minimax_hard_pair, m)?)?;
    m.add_function(wrap_pyfunction!(gen_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add("POLICIES", ["ada-etc", "nada-etc", "succ", "etc", "ucb1", "ucb1-s", "oracle:best"])?;
    Ok(())
}
