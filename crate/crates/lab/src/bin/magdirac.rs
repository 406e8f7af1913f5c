use clap::Parser;
use magdirac_lab::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
