use clap::Parser;
use rcu_age_cli::{execute, finish, Cli};

fn main() {
    let cli = Cli::parse();
    std::process::exit(finish(execute(&cli)));
}
