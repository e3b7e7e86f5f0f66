use clap::Parser;

use aah_floquet::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
