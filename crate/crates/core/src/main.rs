use clap::Parser;

use dfs_secrecy::cli::{run, Cli, RunConfig};

fn main() {
    let config = RunConfig::from(Cli::parse());
    std::process::exit(run(&config));
}
