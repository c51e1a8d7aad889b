//! `uiqa`: dataset generation, rating analysis, metric scoring, splitting,
//! and protocol evaluation from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Every subcommand
//! confines its writes to `--out` and drops a `run_config.json` there with
//! the fully resolved configuration.

mod commands;
mod config;
mod svg;

use clap::Parser;

#[derive(Parser)]
#[command(
    name = "uiqa",
    version,
    about = "Utility-oriented underwater image quality benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: commands::Command,
}

fn init_thread_pool() {
    static ONCE: std::sync::Once = std::sync::Once::new();
    ONCE.call_once(|| {
        if let Some(n) = std::env::var("UIQA_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    });
}

fn dispatch(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    init_thread_pool();
    match cli.command.run() {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn main() {
    std::process::exit(dispatch(std::env::args().collect()));
}
