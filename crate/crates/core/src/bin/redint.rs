use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Parser};
use redint::harness::{self, ConfigOverrides, CHECKS, SEED_ENV};
use redint::{Error, Result};

/// Reproducible checks for the reduced free motion on T*SU(n).
///
/// COMMAND is a check name, `all`, `plot <check>`, `explore` or `list`.
#[derive(Parser, Debug)]
#[command(name = "redint", version)]
struct Cli {
    command: String,
    target: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    max_word_len: Option<usize>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Report (JSON lines) or CSV destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with any of the flags above; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<bool> {
    let overrides = ConfigOverrides {
        n: cli.n,
        seed: cli.seed,
        samples: cli.samples,
        max_word_len: cli.max_word_len,
        t_max: cli.t_max,
        out: cli.out.clone(),
    };
    let env_seed = std::env::var(SEED_ENV).ok();
    let cfg = harness::resolve_config(cli.config.as_deref(), &overrides, env_seed.as_deref())?;
    let reports = match (cli.command.as_str(), cli.target.as_deref()) {
        ("list", None) => {
            CHECKS.iter().for_each(|c| println!("{c}"));
            return Ok(true);
        }
        ("plot", Some(check)) => {
            let path = cfg.output_path.clone().unwrap_or_else(|| PathBuf::from(format!("{check}.csv")));
            harness::emit_plot_data(check, &cfg, &path)?;
            eprintln!("wrote {}", path.display());
            return Ok(true);
        }
        ("plot", None) => return Err(Error::Usage("plot needs a check name".into())),
        ("explore", None) => {
            let (hits, total) =
                redint::apposition::explore_leaf_intersection(cfg.n, cfg.samples, cfg.seed, &cfg.tolerances)?;
            println!("{{\"n\":{},\"samples\":{total},\"principal_hits\":{hits}}}", cfg.n);
            return Ok(true);
        }
        ("all", None) => harness::run_all(&cfg)?,
        (name, None) => vec![harness::run_check(name, &cfg)?],
        (_, Some(extra)) => return Err(Error::Usage(format!("unexpected argument {extra:?}"))),
    };
    for r in &reports {
        println!("{}", r.to_json_line());
    }
    if let Some(path) = &cfg.output_path {
        harness::write_reports(path, &reports)?;
    }
    Ok(reports.iter().all(|r| r.pass))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("redint: {e}");
            ExitCode::from(harness::exit_code(&e) as u8)
        }
    }
}
