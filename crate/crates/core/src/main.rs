use clap::Parser;

fn main() {
    let cli = heyde::cli::Cli::parse();
    std::process::exit(heyde::cli::run(&cli));
}
