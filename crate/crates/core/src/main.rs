use clap::Parser;

fn main() {
    let cli = lipbound::cli::Cli::parse();
    std::process::exit(lipbound::cli::run(cli));
}
