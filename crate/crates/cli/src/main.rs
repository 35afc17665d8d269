use clap::Parser;

fn main() {
    let cli = formspace_cli::args::Cli::parse();
    if let Err(e) = formspace_cli::run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
