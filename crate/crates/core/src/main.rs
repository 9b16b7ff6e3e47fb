use clap::Parser;

fn main() {
    let args = fracvar::cli::Args::parse();
    std::process::exit(fracvar::cli::main_with_args(args));
}
