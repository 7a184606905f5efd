use clap::Parser;

fn main() {
    let cli = convexcert_cli::args::Cli::parse();
    std::process::exit(convexcert_cli::main_with(cli));
}
