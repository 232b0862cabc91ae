use clap::Parser;

fn main() {
    std::process::exit(caloric::cli::run(caloric::cli::Cli::parse()));
}
