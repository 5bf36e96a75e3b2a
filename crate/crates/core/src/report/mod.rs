//! Experiment sweeps and their on-disk outputs.

pub mod config;
pub mod csv;
pub mod plot;
pub mod sweep;

use std::path::PathBuf;

use serde_json::json;

use crate::error::{Error, Result};
use crate::rng::SEED_GAMMA;
use config::SweepConfig;
use csv::CsvSink;
use plot::{emit_plot, Facet};
use sweep::{run_sweep_with, SweepRow};

pub const SWEEP_CSV: &str = "sweep.csv";
pub const SWEEP_META: &str = "sweep.meta.json";

/// Paths produced by [`write_sweep`].
#[derive(Debug, Clone)]
pub struct SweepOutputs {
    pub csv: PathBuf,
    pub meta: PathBuf,
    pub plots: Vec<PathBuf>,
    pub rows: Vec<SweepRow>,
}

/// Runs the sweep and writes `sweep.csv`, `sweep.meta.json` and, when
/// requested, the SVG charts under `config.output_dir`.
///
/// Rows are appended to the CSV as cells finish. If a cell fails the file
/// keeps the finished rows and ends with an `# INCOMPLETE` footer.
pub fn write_sweep(config: &SweepConfig, mut on_row: impl FnMut(&SweepRow)) -> Result<SweepOutputs> {
    config.validate()?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;

    let meta_path = dir.join(SWEEP_META);
    let meta = json!({
        "config_toml": config.to_toml(),
        "seed_scheme": {
            "episode_seed": "splitmix64 fold of (base_seed, instance_index, run_index)",
            "gamma": format!("{SEED_GAMMA:#018x}"),
            "reward_stream": "ChaCha8, stream id = arm index",
        },
        "crate_version": env!("CARGO_PKG_VERSION"),
    });
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta).expect("json") + "\n")
        .map_err(|e| Error::io(format!("writing {}", meta_path.display()), e))?;

    let csv_path = dir.join(SWEEP_CSV);
    let mut sink = CsvSink::create(&csv_path)?;
    let mut rows = Vec::with_capacity(config.cell_count());
    let outcome = run_sweep_with(config, |row| {
        sink.write_row(row)?;
        on_row(row);
        rows.push(row.clone());
        Ok(())
    });
    match outcome {
        Ok(()) => sink.finish()?,
        Err(e) => {
            sink.abort(&e.to_string())?;
            return Err(e);
        }
    }

    let mut plots = Vec::new();
    if config.emit_svg {
        let plot_dir = dir.join("plots");
        plots.extend(emit_plot(&rows, Facet::ByT, &plot_dir)?);
        plots.extend(emit_plot(&rows, Facet::ByK, &plot_dir)?);
    }
    Ok(SweepOutputs {
        csv: csv_path,
        meta: meta_path,
        plots,
        rows,
    })
}
