//! Priority-profile sweeps over many seeds.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::agent::run;
use crate::harness::config::{ProfileConfig, RunConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedProfile {
    pub name: String,
    #[serde(flatten)]
    pub profile: ProfileConfig,
}

impl NamedProfile {
    pub fn new(name: impl Into<String>, profile: ProfileConfig) -> Self {
        NamedProfile {
            name: name.into(),
            profile,
        }
    }

    /// Reads a JSON array of profiles.
    pub fn load_all(path: impl AsRef<Path>) -> Result<Vec<Self>> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| Error::config(format!("profiles{}", e.path()), e.into_inner().to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRun {
    pub profile: String,
    pub seed: u64,
    pub final_hit_rate: f64,
    pub hits: u64,
    pub misses: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSummary {
    pub profile: String,
    pub runs: usize,
    pub mean_hit_rate: f64,
    /// Sample standard deviation; zero for a single run.
    pub std_hit_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    /// Ordered by profile (input order), then by seed (input order).
    pub runs: Vec<SweepRun>,
    pub profiles: Vec<ProfileSummary>,
}

fn aggregate(name: &str, runs: &[&SweepRun]) -> ProfileSummary {
    // summing in seed order keeps the aggregate independent of the order
    // seeds were listed in
    let mut rates: Vec<(u64, f64)> = runs.iter().map(|r| (r.seed, r.final_hit_rate)).collect();
    rates.sort_by_key(|&(seed, _)| seed);
    let n = rates.len() as f64;
    let mean = rates.iter().map(|&(_, v)| v).sum::<f64>() / n;
    let var = if rates.len() > 1 {
        rates.iter().map(|&(_, v)| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    ProfileSummary {
        profile: name.to_string(),
        runs: runs.len(),
        mean_hit_rate: mean,
        std_hit_rate: var.sqrt(),
    }
}

pub fn sweep(base: &RunConfig, profiles: &[NamedProfile], seeds: &[u64]) -> Result<SweepSummary> {
    if profiles.is_empty() {
        return Err(Error::usage("sweep needs at least one profile"));
    }
    if seeds.is_empty() {
        return Err(Error::usage("sweep needs at least one seed"));
    }
    let jobs: Vec<(&NamedProfile, u64)> = profiles
        .iter()
        .flat_map(|p| seeds.iter().map(move |&s| (p, s)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(p, seed)| {
            let config = RunConfig {
                seed,
                profile: p.profile,
                ..base.clone()
            };
            let out = run(&config).map_err(|e| match e {
                Error::Config { field, message } => Error::Config {
                    field,
                    message: format!("{message} (profile {}, seed {seed})", p.name),
                },
                other => Error::usage(format!("profile {}, seed {seed}: {other}", p.name)),
            })?;
            let last = out.metrics.last();
            Ok(SweepRun {
                profile: p.name.clone(),
                seed,
                final_hit_rate: out.final_hit_rate(),
                hits: last.map_or(0, |m| m.hits),
                misses: last.map_or(0, |m| m.misses),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summaries = profiles
        .iter()
        .map(|p| {
            let mine: Vec<&SweepRun> = runs.iter().filter(|r| r.profile == p.name).collect();
            aggregate(&p.name, &mine)
        })
        .collect();
    Ok(SweepSummary {
        runs,
        profiles: summaries,
    })
}

impl SweepSummary {
    pub fn profile(&self, name: &str) -> Option<&ProfileSummary> {
        self.profiles.iter().find(|p| p.profile == name)
    }

    /// Writes `runs.csv` and `summary.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let write = |name: &str, body: &dyn Fn(&mut dyn Write) -> std::io::Result<()>| -> Result<()> {
            let path = dir.join(name);
            let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut w = BufWriter::new(file);
            body(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| Error::io(&path, e))
        };
        write("runs.csv", &|w| {
            writeln!(w, "profile,seed,final_hit_rate,hits,misses")?;
            for r in &self.runs {
                writeln!(
                    w,
                    "{},{},{:.6},{},{}",
                    r.profile, r.seed, r.final_hit_rate, r.hits, r.misses
                )?;
            }
            Ok(())
        })?;
        write("summary.csv", &|w| {
            writeln!(w, "profile,runs,mean_hit_rate,std_hit_rate")?;
            for p in &self.profiles {
                writeln!(
                    w,
                    "{},{},{:.6},{:.6}",
                    p.profile, p.runs, p.mean_hit_rate, p.std_hit_rate
                )?;
            }
            Ok(())
        })
    }
}
