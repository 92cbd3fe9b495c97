use clap::Parser;

fn main() {
    let args = qesdx::cli::Args::parse();
    std::process::exit(qesdx::cli::execute(&args));
}
