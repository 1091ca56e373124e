use clap::Parser;

fn main() {
    std::process::exit(lvrlab::cli::run(lvrlab::cli::Cli::parse()));
}
