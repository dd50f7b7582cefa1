use clap::Parser;

fn main() {
    let cli = jacobi_cli::Cli::parse();
    std::process::exit(jacobi_cli::run(&cli));
}
