use std::process;

use clap::Parser;

mod args;
mod estimate;
mod failure;
mod oracle;
mod output;
mod simulate;

use args::{Cli, Command};
use failure::Failure;

fn main() {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(cli.log_level())
        .format_timestamp(None)
        .parse_env("CIRCDECONV_LOG")
        .init();

    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: cannot configure {jobs} worker threads: {e}");
            process::exit(failure::USAGE);
        }
    }

    let argv: Vec<String> = std::env::args().collect();
    let result: Result<(), Failure> = match &cli.command {
        Command::Estimate(a) => estimate::run(a, &argv),
        Command::Oracle(a) => oracle::run(a),
        Command::Simulate(a) => simulate::run_simulate(a, &argv, cli.jobs),
        Command::Rates(a) => simulate::run_rates(a, &argv, cli.jobs),
    };
    if let Err(f) = result {
        eprintln!("error: {:#}", f.error);
        process::exit(f.code);
    }
}
