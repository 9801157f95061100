use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use needspace::harness::{self, agent, NamedProfile, RunConfig};
use needspace::{load_snapshot, random_baseline, save_snapshot, Error, Snapshot};

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_VERIFY: u8 = 3;

/// Utilities rebuilt from the log must match the snapshot within this.
const REPLAY_TOLERANCE: f64 = 1e-12;

#[derive(Parser)]
#[command(
    name = "needspace",
    version,
    about = "Need-driven learning agent playing single-player ping-pong"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write metrics.csv, snapshot.json and needs.svg.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        ticks: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write frames.txt with the board after every tick.
        #[arg(long)]
        frames: bool,
    },
    /// Run every profile against every seed and summarize hit rates.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// JSON array of {name, happy, sad, novelty, expectedness, energy}.
        #[arg(long)]
        profiles: PathBuf,
        /// Seed range, `a..b` (exclusive) or `a..=b`.
        #[arg(long)]
        seeds: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hit rate of uniformly random play on the configured board.
    Baseline {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        ticks: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Rebuild the model from a snapshot's log and compare with its tables.
    Replay {
        #[arg(long)]
        snapshot: PathBuf,
    },
    /// Render a metrics CSV as an SVG of the need traces.
    Plot {
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
struct VerifyFailure(String);

impl std::fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "replay mismatch: {}", self.0)
    }
}

impl std::error::Error for VerifyFailure {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<VerifyFailure>().is_some() {
        return EXIT_VERIFY;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Io { .. } | Error::Load { .. } | Error::Version { .. }) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

/// Flags, then the config file, then `NEEDSPACE_OUT_DIR`, then `./out`.
fn output_dir(flag: Option<PathBuf>, config: &RunConfig) -> PathBuf {
    flag.or_else(|| config.out_dir.clone())
        .or_else(|| std::env::var_os("NEEDSPACE_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn parse_seeds(range: &str) -> Result<Vec<u64>, Error> {
    let bad = || Error::Config {
        field: "seeds".into(),
        message: format!("expected `a..b` or `a..=b`, got `{range}`"),
    };
    let (a, b, inclusive) = if let Some((a, b)) = range.split_once("..=") {
        (a, b, true)
    } else if let Some((a, b)) = range.split_once("..") {
        (a, b, false)
    } else {
        let one: u64 = range.trim().parse().map_err(|_| bad())?;
        return Ok(vec![one]);
    };
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    let seeds: Vec<u64> = if inclusive {
        (a..=b).collect()
    } else {
        (a..b).collect()
    };
    if seeds.is_empty() {
        return Err(Error::Usage(format!("seed range `{range}` is empty")));
    }
    Ok(seeds)
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run {
            config,
            seed,
            ticks,
            out,
            frames,
        } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(ticks) = ticks {
                cfg.ticks = ticks;
            }
            let dir = output_dir(out, &cfg);
            create_dir(&dir)?;
            let result = agent::run_with(&cfg, frames)?;
            harness::emit_csv(&result.metrics, dir.join("metrics.csv"))?;
            save_snapshot(&result.snapshot(), dir.join("snapshot.json"))?;
            harness::emit_plot(&result.metrics, dir.join("needs.svg"))?;
            if frames {
                let path = dir.join("frames.txt");
                fs::write(&path, result.frames.join("\n")).map_err(|e| Error::Io { path, source: e })?;
            }
            println!(
                "seed {} ticks {}: final hit rate {:.4}, {} model entries -> {}",
                cfg.seed,
                cfg.ticks,
                result.final_hit_rate(),
                result.model.len(),
                dir.display()
            );
        }
        Command::Sweep {
            config,
            profiles,
            seeds,
            out,
        } => {
            let cfg = RunConfig::load(&config)?;
            let profiles = NamedProfile::load_all(&profiles)?;
            let seeds = parse_seeds(&seeds)?;
            let dir = output_dir(out, &cfg);
            create_dir(&dir)?;
            let summary = harness::sweep(&cfg, &profiles, &seeds)?;
            summary.write(&dir)?;
            for p in &summary.profiles {
                println!(
                    "{}: mean hit rate {:.4} (sd {:.4}, n = {})",
                    p.profile, p.mean_hit_rate, p.std_hit_rate, p.runs
                );
            }
        }
        Command::Baseline { config, ticks, seed } => {
            let cfg = RunConfig::load(&config)?;
            match random_baseline(&cfg.board, seed.unwrap_or(cfg.seed), ticks)? {
                Some(rate) => println!("random baseline hit rate {rate:.6} over {ticks} ticks"),
                None => println!("no events in {ticks} ticks"),
            }
        }
        Command::Replay { snapshot } => {
            let snap: Snapshot = load_snapshot(&snapshot)?;
            match snap
                .verify_replay(REPLAY_TOLERANCE)
                .with_context(|| format!("rebuilding {}", snapshot.display()))?
            {
                None => println!(
                    "replay ok: {} records, {} model entries",
                    snap.log.len(),
                    snap.model.edges.len()
                ),
                Some(diff) => return Err(VerifyFailure(diff).into()),
            }
        }
        Command::Plot { metrics, out } => {
            let rows = harness::parse_csv(&metrics)?;
            harness::emit_plot(&rows, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
