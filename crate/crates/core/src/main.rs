use clap::Parser;
use magspec::cli::{run, Cli};

fn main() {
    faer::set_global_parallelism(faer::Par::Seq);
    let cli = Cli::parse();
    std::process::exit(run(&cli));
}
