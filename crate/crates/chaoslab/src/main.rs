use clap::Parser;

fn main() {
    let cli = chaoslab::cli::Cli::parse();
    if let Err(err) = chaoslab::cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
