use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use maxbandit::report::config::ConfigLayer;
use maxbandit::report::sweep::run_sweep;
use maxbandit::report::write_sweep;
use maxbandit::{
    bound_report, compare_policies, fixture, gen_uniform, instance_lower_bound, run_episode_traced,
    threads_from_env, with_threads, BanditInstance, Error, GenSpec, PolicySpec, Result,
};

#[derive(Parser)]
#[command(name = "maxbandit", version, about = "Bandit experiments under the max-of-cumulative-rewards objective")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate regret of policies on one instance (or one generated cell).
    Simulate(SimulateArgs),
    /// Run a K x T x alpha x policy sweep and write CSV/JSON/SVG outputs.
    Sweep(SweepArgs),
    /// Print the lower-bound coefficient and the itemized ADA-ETC upper bound.
    Bounds(BoundsArgs),
    /// Generate random Bernoulli instances as JSON.
    GenInstances(GenArgs),
    /// List fixture names, or print one fixture as JSON.
    Fixtures {
        #[arg(long)]
        fixture: Option<String>,
    },
}

#[derive(Args, Default)]
struct InstanceSource {
    /// Named fixture, e.g. `fig1` or `two-arm-gap:0.2`.
    #[arg(long)]
    fixture: Option<String>,
    /// JSON instance file: {"arms":[{"kind":"bernoulli","p":0.5}, ...]}.
    #[arg(long)]
    instance: Option<PathBuf>,
}

impl InstanceSource {
    fn load(&self) -> Result<Option<BanditInstance>> {
        match (&self.fixture, &self.instance) {
            (Some(_), Some(_)) => Err(Error::InvalidConfig(
                "use either --fixture or --instance".into(),
            )),
            (Some(name), None) => fixture(name).map(Some),
            (None, Some(path)) => read_instance(path).map(Some),
            (None, None) => Ok(None),
        }
    }
}

fn read_instance(path: &Path) -> Result<BanditInstance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    source: InstanceSource,
    #[arg(long = "T")]
    horizon: u64,
    #[arg(long, value_delimiter = ',', default_value = "ada-etc,etc,ucb1")]
    policies: Vec<PolicySpec>,
    #[arg(long, default_value_t = 500)]
    runs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Generated cell: number of arms (when no fixture/instance is given).
    #[arg(long = "K")]
    arms: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// Write the first run's traces (one per policy) to this JSON file.
    #[arg(long)]
    traces: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML file with keys K, T, alpha, policies, instances, runs, seed, out, svg.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "K", value_delimiter = ',')]
    arms: Option<Vec<usize>>,
    #[arg(long = "T", value_delimiter = ',')]
    horizons: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    policies: Option<Vec<PolicySpec>>,
    #[arg(long)]
    instances: Option<usize>,
    #[arg(long)]
    runs: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    source: InstanceSource,
    #[arg(long = "T")]
    horizon: u64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long = "K")]
    arms: usize,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 500)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json"));
}

fn simulate(args: SimulateArgs) -> Result<()> {
    match args.source.load()? {
        Some(instance) => {
            let rows = compare_policies(&instance, &args.policies, args.horizon, args.runs, args.seed)?;
            let table: Vec<_> = args
                .policies
                .iter()
                .zip(&rows)
                .map(|(p, r)| json!({ "policy": p.to_string(), "estimate": r }))
                .collect();
            if let Some(path) = &args.traces {
                let seed = maxbandit::rng::derive_seed(args.seed, 0, 0);
                let episodes = args
                    .policies
                    .iter()
                    .map(|&p| {
                        run_episode_traced(&instance, p, args.horizon, seed, true)
                            .map(|ep| json!({ "policy": p.to_string(), "episode": ep }))
                    })
                    .collect::<Result<Vec<_>>>()?;
                std::fs::write(path, serde_json::to_string_pretty(&episodes).expect("json"))
                    .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
            }
            print_json(&json!({ "instance": instance, "T": args.horizon, "rows": table }));
        }
        None => {
            let arms = args.arms.ok_or_else(|| {
                Error::InvalidConfig("simulate needs --fixture, --instance or --K".into())
            })?;
            let config = ConfigLayer {
                k_grid: Some(vec![arms]),
                t_grid: Some(vec![args.horizon]),
                alpha_grid: Some(vec![args.alpha]),
                policies: Some(args.policies),
                n_instances: Some(args.instances),
                n_runs: Some(args.runs),
                base_seed: Some(args.seed),
                ..Default::default()
            }
            .resolve()?;
            let rows = run_sweep(&config)?;
            print_json(&json!({ "rows": rows }));
        }
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let file = match &args.config {
        Some(path) => ConfigLayer::load(path)?,
        None => ConfigLayer::default(),
    };
    let flags = ConfigLayer {
        k_grid: args.arms,
        t_grid: args.horizons,
        alpha_grid: args.alpha,
        policies: args.policies,
        n_instances: args.instances,
        n_runs: args.runs,
        base_seed: args.seed,
        output_dir: args.out,
        emit_svg: args.svg.then_some(true),
    };
    let config = file.overlay(flags).resolve()?;
    let total = config.cell_count();
    let mut done = 0;
    let outputs = write_sweep(&config, |row| {
        done += 1;
        eprintln!(
            "[{done}/{total}] K={} T={} alpha={} {}: regret {:.3} +- {:.3}",
            row.arms, row.horizon, row.alpha, row.policy, row.mean_regret, row.stderr
        );
    })?;
    eprintln!("wrote {}", outputs.csv.display());
    for p in &outputs.plots {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn bounds(args: BoundsArgs) -> Result<()> {
    let instance = args
        .source
        .load()?
        .ok_or_else(|| Error::InvalidConfig("bounds needs --fixture or --instance".into()))?;
    let report = bound_report(&instance, args.horizon)?;
    let lower = instance_lower_bound(&instance, args.horizon as f64).ok();
    print_json(&json!({ "report": report, "lower_bound": lower }));
    Ok(())
}

fn gen_instances(args: GenArgs) -> Result<()> {
    let instances = gen_uniform(&GenSpec {
        arms: args.arms,
        alpha: args.alpha,
        n_instances: args.instances,
        seed: args.seed,
    })?;
    let text = serde_json::to_string_pretty(&instances).expect("json");
    match &args.out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn fixtures(name: Option<String>) -> Result<()> {
    match name {
        Some(name) => print_json(&serde_json::to_value(fixture(&name)?).expect("json")),
        None => {
            for name in maxbandit::instances::FIXTURE_NAMES {
                println!("{name}");
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Sweep(args) => sweep(args),
        Command::Bounds(args) => bounds(args),
        Command::GenInstances(args) => gen_instances(args),
        Command::Fixtures { fixture } => fixtures(fixture),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match threads_from_env() {
        Some(n) => with_threads(n, || run(cli)),
        None => run(cli),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = if e.is_validation() { "validation" } else { "runtime" };
            eprintln!("{}", json!({ "error": kind, "message": e.to_string() }));
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
