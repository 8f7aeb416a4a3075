use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mobius_cli::config::{Config, ScenarioName};
use mobius_cli::{acceptance, scenarios};

#[derive(Parser)]
#[command(
    name = "mobius",
    version,
    about = "Kinetic-energy geometry of split unitary Möbius actions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a JSON config.
    Run {
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List scenario names and what they test.
    ListScenarios,
    /// Run the acceptance suite, or a subset of criteria by number.
    Acceptance {
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

fn run(config: PathBuf, seed: Option<u64>, out: Option<PathBuf>) -> ExitCode {
    let result = Config::load(&config).and_then(|mut cfg| {
        if let Some(s) = seed {
            cfg.seed = s;
        }
        if out.is_some() {
            cfg.output = out;
        }
        let dir = cfg.output_dir();
        scenarios::run(&cfg, &dir).map(|r| (r, dir))
    });
    match result {
        Ok((report, dir)) => {
            let status = if report.pass { "pass" } else { "FAIL" };
            println!(
                "{}: {status} ({} checks, {} failed)",
                report.scenario,
                report.checks,
                report.failures.len()
            );
            for f in &report.failures {
                println!("  {}: {} {} {}", f.check, f.value, f.relation, f.bound);
            }
            println!("report: {}", dir.join(scenarios::REPORT_FILE).display());
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, seed, out } => run(config, seed, out),
        Command::ListScenarios => {
            for s in ScenarioName::ALL {
                println!("{:<20} {}", s.as_str(), s.theorem());
            }
            ExitCode::SUCCESS
        }
        Command::Acceptance { only } => {
            let ids: Vec<usize> = if only.is_empty() {
                (1..=acceptance::CRITERIA.len()).collect()
            } else {
                only
            };
            if let Some(bad) = ids
                .iter()
                .find(|&&i| i == 0 || i > acceptance::CRITERIA.len())
            {
                eprintln!("error: no criterion {bad}");
                return ExitCode::from(2);
            }
            let mut all = true;
            for id in ids {
                let o = acceptance::run_one(id);
                println!("{}", o.line());
                all &= o.pass;
            }
            if all {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
