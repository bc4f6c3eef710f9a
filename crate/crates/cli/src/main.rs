use clap::Parser;
use qxor_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    let run = qxor_cli::run(&cli);
    for line in &run.summary {
        println!("{line}");
    }
    if let Some(e) = &run.error {
        eprintln!("error: {e}");
    }
    std::process::exit(run.report.exit_status);
}
