mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use config::{Command, ExperimentConfig};
use output::Writer;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable inputs, schema violations. Exit 1.
    Usage(String),
    /// An invariant check on the results failed. Exit 2.
    Invariant(String),
    /// A computation failed. Exit 2.
    Internal(String),
}

#[derive(Parser, Debug)]
#[command(name = "equidist", version, about = "Experiments on Lie subalgebras, lattices, horocycle flows and integral points")]
struct Cli {
    /// JSON file matching the experiment config schema; replaces the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel kernels.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write a gnuplot script next to the CSV files.
    #[arg(long, global = true)]
    gnuplot: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

fn resolve(cli: Cli) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match (cli.config, cli.command) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give either --config or a subcommand, not both".into())),
        (Some(path), None) => ExperimentConfig::from_file(&path)?,
        (None, Some(command)) => ExperimentConfig { seed: 0, threads: None, out: PathBuf::from("out"), gnuplot: false, command },
        (None, None) => return Err(Failure::Usage("missing subcommand (subalg | dioph | heights | count | flow | linnik); see --help".into())),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = cli.out {
        cfg.out = o;
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    cfg.gnuplot |= cli.gnuplot;
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cfg: &ExperimentConfig) -> Result<Vec<String>, Failure> {
    if let Some(n) = cfg.threads {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let start = Instant::now();
    let mut w = Writer::new(&cfg.out, output::config_hash(cfg), cfg.seed)?;
    let result = match &cfg.command {
        Command::Subalg(a) => commands::subalg(a, &mut w),
        Command::Dioph(a) => commands::dioph(a, cfg.seed, &mut w),
        Command::Heights(a) => commands::heights(a, &mut w),
        Command::Count(a) => commands::count(a, cfg.gnuplot, &mut w),
        Command::Flow(a) => commands::flow(a, cfg.seed, cfg.gnuplot, &mut w),
        Command::Linnik(a) => commands::linnik(a, cfg.gnuplot, &mut w),
    };
    let status = match &result {
        Ok(()) => "ok".to_string(),
        Err(Failure::Invariant(m)) => format!("invariant failed: {m}"),
        Err(Failure::Usage(m)) => format!("usage error: {m}"),
        Err(Failure::Internal(m)) => format!("error: {m}"),
    };
    let mut artifacts = w.written.clone();
    artifacts.sort();
    let manifest = json!({
        "command": cfg.command.name(),
        "config": cfg,
        "config_hash": w.hash(),
        "seed": cfg.seed,
        "versions": { "equidist": env!("CARGO_PKG_VERSION") },
        "artifacts": artifacts,
        "status": status,
        "wall_time_seconds": start.elapsed().as_secs_f64(),
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Internal(e.to_string()))? + "\n";
    w.text("manifest.json", &text)?;
    result.map(|()| artifacts)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = resolve(cli).and_then(|cfg| execute(&cfg).map(|a| (cfg, a)));
    match outcome {
        Ok((cfg, artifacts)) => {
            println!("{}: wrote {} artifacts to {}", cfg.command.name(), artifacts.len() + 1, cfg.out.display());
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(m)) => {
            eprintln!("invariant failed: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
