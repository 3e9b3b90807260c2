use clap::Parser;

fn main() {
    let args = halfinv::cli::Args::parse();
    std::process::exit(halfinv::cli::main_with(&args));
}
