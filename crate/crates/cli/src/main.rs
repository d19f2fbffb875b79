use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use browder_core::artifacts::{corpus_listing, run_lift_trace, run_trace, run_witness, TraceArtifacts};
use browder_core::RunConfig;
use clap::{Args, Parser, Subcommand};

/// Certified tracing of parametric fixed-point continua.
#[derive(Parser, Debug)]
#[command(name = "browder", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trace a one-parameter oracle; writes boxes.csv, components.json and
    /// plot.svg (n = 1). Exits 2 if some level has no spanning component.
    Trace(Common),
    /// Refute or confirm a claimed fixed-point set; writes witness.json.
    Witness(Common),
    /// Trace a two-parameter oracle through the Hilbert curve; also writes
    /// cells.csv.
    LiftTrace(Common),
    /// List the built-in oracles.
    Corpus(Common),
    /// Trace and write only plot.svg.
    Plot(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// key=value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    function: Option<String>,
    #[arg(long)]
    k_start: Option<u32>,
    #[arg(long)]
    k_max: Option<u32>,
    /// Keep only spanning components at each level (default).
    #[arg(long, overrides_with = "no_prune")]
    prune: bool,
    #[arg(long, overrides_with = "prune")]
    no_prune: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Claimed fixed-point set: one box per line, `k j_0 ... j_n`.
    #[arg(long)]
    claimed_set: Option<PathBuf>,
    #[arg(long)]
    curve_order: Option<u32>,
    #[arg(long)]
    cantor_depth: Option<u32>,
    #[arg(long)]
    param_dims: Option<u32>,
    /// Tabulated oracle (JSON); replaces --function.
    #[arg(long)]
    table: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
                RunConfig::parse(&text).with_context(|| format!("in config {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = &self.function {
            config.function = Some(v.clone());
        }
        if let Some(v) = self.k_start {
            config.k_start = v;
        }
        if let Some(v) = self.k_max {
            config.k_max = v;
        }
        if self.prune {
            config.prune = true;
        }
        if self.no_prune {
            config.prune = false;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.samples {
            config.samples = v;
        }
        if let Some(v) = &self.out {
            config.out = v.clone();
        }
        if let Some(v) = &self.claimed_set {
            config.claimed_set = Some(v.clone());
        }
        if let Some(v) = self.curve_order {
            config.curve_order = Some(v);
        }
        if let Some(v) = self.cantor_depth {
            config.cantor_depth = v;
        }
        if let Some(v) = self.param_dims {
            config.param_dims = v;
        }
        if let Some(v) = &self.table {
            config.table = Some(v.clone());
        }
        config.validate()?;
        Ok(config)
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_trace(dir: &Path, a: &TraceArtifacts) -> Result<()> {
    write(dir, "boxes.csv", &a.boxes_csv)?;
    write(dir, "components.json", &a.components_json)?;
    if let Some(svg) = &a.plot_svg {
        write(dir, "plot.svg", svg)?;
    }
    Ok(())
}

fn trace_exit(a: &TraceArtifacts) -> u8 {
    let r = &a.result;
    match r.diagnostic() {
        None => {
            let d = r.deepest();
            println!(
                "{}: spanning component certified at every level up to {} ({} boxes, {} components)",
                r.oracle,
                d.k,
                d.boxes.len(),
                d.labeling.len()
            );
            0
        }
        Some(msg) => {
            eprintln!("{msg}");
            2
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Corpus(c) => {
            let config = c.resolve()?;
            print!("{}", corpus_listing(config.cantor_depth)?);
            Ok(0)
        }
        Command::Trace(c) => {
            let config = c.resolve()?;
            let a = run_trace(&config)?;
            fs::create_dir_all(&config.out)?;
            write_trace(&config.out, &a)?;
            Ok(trace_exit(&a))
        }
        Command::Plot(c) => {
            let config = c.resolve()?;
            let a = run_trace(&config)?;
            let svg = a.plot_svg.as_deref().context("plot needs a one-dimensional state space")?;
            fs::create_dir_all(&config.out)?;
            write(&config.out, "plot.svg", svg)?;
            Ok(trace_exit(&a))
        }
        Command::Witness(c) => {
            let config = c.resolve()?;
            let a = run_witness(&config)?;
            fs::create_dir_all(&config.out)?;
            write(&config.out, "witness.json", &a.witness_json)?;
            let r = &a.report;
            println!(
                "{:?}: {} refutations among {} approximate fixed points in {} samples; {} range violations",
                r.verdict, r.refutation_count, r.approximate_fixed_points, r.samples, r.range_violations
            );
            Ok(0)
        }
        Command::LiftTrace(c) => {
            let mut config = c.resolve()?;
            config.param_dims = 2;
            let a = run_lift_trace(&config)?;
            fs::create_dir_all(&config.out)?;
            write_trace(&config.out, &a.trace)?;
            if let (Some(csv), Some(cov)) = (&a.cells_csv, &a.coverage) {
                write(&config.out, "cells.csv", csv)?;
                println!("{}: {} of {} parameter cells covered", a.curve, cov.cells.len(), cov.total());
            }
            Ok(trace_exit(&a.trace))
        }
    }
}

fn main() -> ExitCode {
    // clap exits 2 on usage errors, which is reserved for "no spanning component"
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
