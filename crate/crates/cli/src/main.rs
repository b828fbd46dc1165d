use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spli::error::{CliError, Result};
use spli::pipeline::{self, load_state, run_pipeline, write_enriched, write_json, write_reports, MODEL_FILE, TRAIN_REPORT_FILE};
use spli::report::GroupBy;
use spli::{stages, synth};
use spli_core::config::IndicatorConfig;
use spli_core::Exec;

#[derive(Parser, Debug)]
#[command(name = "spli", version, about = "Site planning layout indicators from GeoJSON layers")]
struct Cli {
    /// TOML config; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run every stage on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse and join the input layers.
    Ingest,
    /// Form type and orientation per building.
    Forms,
    /// Layout pattern per plot.
    Layouts,
    /// Functional ratio and Simpson index per plot.
    Diversity,
    /// Connectivity index and transit accessibility per plot.
    Access,
    /// Floor area ratio and building coverage ratio per plot.
    Intensity,
    /// Building-function classifier.
    Functions {
        #[command(subcommand)]
        action: FunctionsCmd,
    },
    /// CSV tables and SVG charts grouped by land use or subzone.
    Report {
        /// land_use or subzone; both when omitted.
        #[arg(long)]
        group_by: Option<GroupBy>,
    },
    /// Every enabled stage in order.
    Pipeline,
    /// Writes a seeded synthetic town and its config to --out-dir.
    SynthTown,
}

#[derive(Subcommand, Debug)]
enum FunctionsCmd {
    /// Fit on labelled buildings and write the checkpoint.
    Train,
    /// Fill missing level-2 labels from a checkpoint.
    Predict {
        /// Checkpoint path; defaults to the config's model or <out-dir>/model.json.
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

fn load_config(cli: &Cli) -> Result<IndicatorConfig> {
    let mut cfg = match &cli.config {
        Some(p) => IndicatorConfig::load(p)?,
        None => IndicatorConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn stage(cfg: &IndicatorConfig, out: &Path, exec: Exec, f: impl FnOnce(&mut spli_core::Dataset) -> Result<String>) -> Result<()> {
    let mut ds = load_state(cfg, out, exec)?;
    let note = f(&mut ds)?;
    log::info!("{note}");
    write_enriched(&ds, cfg, out)
}

fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let out = cli.out_dir.as_path();
    if let Cmd::SynthTown = cli.cmd {
        let seed = cli.seed.unwrap_or(7);
        synth::write_town(&synth::generate(seed), out)?;
        println!("synthetic town written to {}", out.display());
        return Ok(());
    }
    let cfg = load_config(&cli)?;
    match &cli.cmd {
        Cmd::Ingest => {
            let ds = stages::ingest(&cfg, exec)?;
            println!("{}", stages::ingest_note(&ds));
            write_json(&out.join(pipeline::REJECTIONS_FILE), &ds.rejections)?;
            write_enriched(&ds, &cfg, out)
        }
        Cmd::Forms => stage(&cfg, out, exec, |ds| Ok(stages::forms(ds, &cfg, exec))),
        Cmd::Layouts => stage(&cfg, out, exec, |ds| Ok(stages::layouts(ds, &cfg, exec))),
        Cmd::Diversity => stage(&cfg, out, exec, |ds| Ok(stages::diversity(ds, &cfg, exec))),
        Cmd::Access => stage(&cfg, out, exec, |ds| Ok(stages::access(ds, &cfg, exec))),
        Cmd::Intensity => stage(&cfg, out, exec, |ds| Ok(stages::intensity(ds, &cfg, exec))),
        Cmd::Functions { action: FunctionsCmd::Train } => {
            let ds = load_state(&cfg, out, exec)?;
            let (ck, report) = stages::functions_train(&ds, &cfg)?;
            let p = out.join(MODEL_FILE);
            std::fs::create_dir_all(out).map_err(|e| CliError::output(out, e))?;
            ck.save(&p).map_err(|e| CliError::output(&p, e))?;
            write_json(&out.join(TRAIN_REPORT_FILE), &report)?;
            println!(
                "cross-validation accuracy {:.3} (majority baseline {:.3}); model written to {}",
                report.cv_accuracy,
                report.majority_baseline,
                p.display()
            );
            Ok(())
        }
        Cmd::Functions { action: FunctionsCmd::Predict { model } } => {
            let path = model.clone().or_else(|| cfg.functions.model.clone()).unwrap_or_else(|| out.join(MODEL_FILE));
            let ck = stages::load_checkpoint(&path)?;
            stage(&cfg, out, exec, |ds| stages::functions_predict(ds, &cfg, &ck))
        }
        Cmd::Report { group_by } => {
            let ds = load_state(&cfg, out, exec)?;
            let groups = group_by.map_or(GroupBy::ALL.to_vec(), |g| vec![g]);
            for g in groups {
                for f in write_reports(&ds, g, out)? {
                    println!("{}", out.join(f).display());
                }
            }
            Ok(())
        }
        Cmd::Pipeline => {
            let m = run_pipeline(&cfg, out, exec)?;
            for s in &m.stages {
                println!("{:<10} {:?} {:>9.1} ms  {}", s.stage, s.status, s.millis, s.note);
            }
            Ok(())
        }
        Cmd::SynthTown => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
