mod config;
mod emit;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use prodherz::verify::extrapolation::estimate_weight_constant;
use prodherz::verify::{weight_block_params, Suite, SUITE_NAMES};
use rayon::prelude::*;
use serde::Serialize;

use config::{ConfigError, Format, Job, RunConfig};
use emit::{Entry, Index};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PREDICATE: u8 = 3;
const EXIT_RUNTIME: u8 = 4;

#[derive(Parser)]
#[command(name = "prodherz", version, about = "Run inequality sweeps on product Herz and Morrey-Herz spaces")]
struct Cli {
    /// Worker threads for the trial pool (defaults to one per core).
    #[arg(long, global = true, env = "PRODHERZ_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every suite of a config and write one report per suite and parameter block.
    Run {
        config: PathBuf,
        /// Treat out-of-hypothesis results as failures.
        #[arg(long)]
        strict: bool,
        /// Output directory (overrides the config; default `reports`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report format (overrides the config; default json).
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Run independent suites concurrently.
        #[arg(long)]
        parallel: bool,
    },
    /// List the available suites.
    ListSuites {
        /// Print each suite with its default options as JSON.
        #[arg(long)]
        defaults: bool,
    },
    /// Estimate the Rubio de Francia constant for each extrapolation suite of a config.
    EstimateC { config: PathBuf },
}

fn load(path: &Path) -> std::result::Result<RunConfig, ExitCode> {
    RunConfig::load(path).map_err(|e| {
        eprintln!("prodherz: {e}");
        ExitCode::from(match e {
            ConfigError::Usage(_) => EXIT_USAGE,
            ConfigError::Predicate(_) => EXIT_PREDICATE,
        })
    })
}

fn run_job(job: &Job, dir: &std::path::Path, format: Format) -> Entry {
    let start = Instant::now();
    let result = (|| -> Result<Entry> {
        let report = job.run.run().with_context(|| format!("{} failed", job.stem()))?;
        let file = format!("{}.{}", job.stem(), format.extension());
        emit::write_file(&dir.join(&file), &emit::render(&report, format)?)?;
        Ok(Entry::from_report(job, &file, &report))
    })();
    let entry = result.unwrap_or_else(|e| Entry::from_error(job, &e));
    eprintln!("{}: {} ({:.1}s)", job.stem(), entry.status, start.elapsed().as_secs_f64());
    entry
}

fn run(config: PathBuf, strict: bool, out: Option<PathBuf>, format: Option<Format>, parallel: bool) -> ExitCode {
    let cfg = match load(&config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let format = format.or(cfg.format).unwrap_or_default();
    let dir = out.or(cfg.out).unwrap_or_else(|| PathBuf::from("reports"));
    if let Err(e) = std::fs::create_dir_all(&dir) {
        eprintln!("prodherz: cannot create {}: {e}", dir.display());
        return ExitCode::from(EXIT_RUNTIME);
    }
    let mut jobs = cfg.jobs;
    for j in &mut jobs {
        j.strict |= strict;
    }
    let entries: Vec<Entry> = if parallel || cfg.parallel {
        jobs.par_iter().map(|j| run_job(j, &dir, format)).collect()
    } else {
        jobs.iter().map(|j| run_job(j, &dir, format)).collect()
    };
    for e in &entries {
        let mut line = format!("{:<40} {}", e.file.as_deref().unwrap_or("-"), e.status);
        if !e.failed_checks.is_empty() {
            line.push_str(&format!(" [{}]", e.failed_checks.join(", ")));
        }
        if let Some(err) = &e.error {
            line.push_str(&format!(": {err}"));
        }
        println!("{line}");
    }
    let errored = entries.iter().any(|e| e.error.is_some());
    let index = Index::new(format, entries);
    if let Err(e) = index.write(&dir) {
        eprintln!("prodherz: {e:#}");
        return ExitCode::from(EXIT_RUNTIME);
    }
    if errored {
        ExitCode::from(EXIT_RUNTIME)
    } else if index.all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn list_suites(defaults: bool) -> ExitCode {
    for name in SUITE_NAMES {
        if defaults {
            let suite = Suite::default_for(name).expect("every suite has defaults");
            println!("{}", serde_json::to_string(&suite).expect("options serialize"));
        } else {
            println!("{name:<20} {}", Suite::describe(name).unwrap_or(""));
        }
    }
    ExitCode::SUCCESS
}

#[derive(Serialize)]
struct Estimate {
    suite_index: usize,
    params_index: usize,
    params: prodherz::norms::ExponentParams,
    p0: f64,
    block_params: prodherz::norms::ExponentParams,
    c: f64,
    observed: f64,
    samples: usize,
}

fn estimate(config: PathBuf) -> ExitCode {
    let cfg = match load(&config) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let targets: Vec<_> = cfg
        .jobs
        .iter()
        .filter_map(|j| match &j.run.suite {
            Suite::Extrapolation(o) => Some((j, o)),
            _ => None,
        })
        .collect();
    if targets.is_empty() {
        eprintln!("prodherz: usage error: suites: estimate-c needs at least one extrapolation suite");
        return ExitCode::from(EXIT_USAGE);
    }
    let mut out = Vec::new();
    for (job, opts) in targets {
        let found = weight_block_params(&job.run.params, opts.p0)
            .and_then(|b| estimate_weight_constant(&job.run, opts).map(|e| (b, e)));
        match found {
            Ok((block_params, e)) => out.push(Estimate {
                suite_index: job.suite_index,
                params_index: job.params_index,
                params: job.run.params,
                p0: opts.p0,
                block_params,
                c: e.c,
                observed: e.observed,
                samples: e.ratios.len(),
            }),
            Err(e) => {
                eprintln!("prodherz: {}: {e}", job.stem());
                return ExitCode::from(EXIT_RUNTIME);
            }
        }
    }
    println!("{}", serde_json::to_string_pretty(&out).expect("estimates serialize"));
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("prodherz: cannot size the worker pool: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    }
    match cli.command {
        Command::Run { config, strict, out, format, parallel } => run(config, strict, out, format, parallel),
        Command::ListSuites { defaults } => list_suites(defaults),
        Command::EstimateC { config } => estimate(config),
    }
}
