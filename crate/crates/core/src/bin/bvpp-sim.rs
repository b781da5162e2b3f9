use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bvpp_core::config::ScenarioConfig;
use bvpp_core::pipeline::{output_dir, run_case1, run_case2, run_generate, RunManifest, RunOptions, VERSION};
use bvpp_core::{Error, Result, Scenario};

#[derive(Parser)]
#[command(name = "bvpp-sim", version, about = "Building virtual power plant simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides the global seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Treat warnings as errors.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate household profiles.
    Generate,
    /// Scheduling, aggregation, battery bidding and settlement.
    Case1,
    /// Clustering, flagging and peer recommendations.
    Case2,
    /// Check the config and print its hash.
    ValidateConfig,
    /// Print the toolkit version.
    Version,
}

fn load(cli: &Cli) -> Result<Scenario> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config {
            field: "--config".into(),
            reason: "a config file is required".into(),
        })?;
    let (mut config, base) = ScenarioConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.resolve(&base)
}

fn summarize(manifest: &RunManifest) {
    let files = manifest.files().count();
    println!(
        "{}: {} households, {files} files, config {}",
        manifest.command,
        manifest.households,
        &manifest.config_hash[..12]
    );
    if let Some(c) = &manifest.campaign {
        println!(
            "campaign: {} targets, {} recommended, total {:.6} $/day, mean {:.6} $/day",
            c.targets, c.recommended, c.total, c.mean
        );
    }
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("--threads: {e}")))?;
    }
    let options = RunOptions { strict: cli.strict };
    match cli.command {
        Command::Version => println!("bvpp-sim {VERSION}"),
        Command::ValidateConfig => {
            let s = load(cli)?;
            println!("ok: {} households, config {}", s.households.len(), s.config_hash());
        }
        Command::Generate => {
            let s = load(cli)?;
            summarize(&run_generate(&s, &output_dir(&s, cli.out.as_deref()), &options)?);
        }
        Command::Case1 => {
            let s = load(cli)?;
            let (report, manifest) = run_case1(&s, &output_dir(&s, cli.out.as_deref()), &options)?;
            summarize(&manifest);
            let st = &report.settlement;
            println!(
                "revenue {:.6}, payments {:.6}, operator profit {:.6}",
                st.market_revenue,
                st.total_payments(),
                st.operator_profit
            );
        }
        Command::Case2 => {
            let s = load(cli)?;
            let (_, manifest) = run_case2(&s, &output_dir(&s, cli.out.as_deref()), &options)?;
            summarize(&manifest);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BVPP_SIM_LOG", "warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config { .. } => 2,
                Error::Strict(_) => 3,
                _ => 1,
            })
        }
    }
}
