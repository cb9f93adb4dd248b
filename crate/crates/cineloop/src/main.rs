use clap::Parser;

fn main() {
    let cli = cineloop::cli::Cli::parse();
    if let Err(err) = cineloop::cli::run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
