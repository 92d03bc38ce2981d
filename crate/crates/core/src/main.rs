use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use blobscan::detection::DetectionConfig;
use blobscan::eval::{evaluate, load_ground_truth, render_eval_text};
use blobscan::report::{render_json, render_stats_text, render_text, run_detect, run_stats, RunOptions};

#[derive(Parser)]
#[command(name = "blobscan", version, about = "Detects Blob Listeners in Java Swing code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Source file or directory to analyze.
    root: PathBuf,
    /// Minimum number of commands for a Blob Listener.
    #[arg(long, default_value_t = 3)]
    threshold: usize,
    /// Bundled toolkit name or path to a catalog file.
    #[arg(long, default_value = "swing")]
    toolkit: String,
    /// Maximum number of name-resolution hops when tracing GUI references.
    #[arg(long, default_value_t = 8)]
    max_trace_depth: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

impl Common {
    fn config(&self) -> DetectionConfig {
        DetectionConfig { threshold: self.threshold, max_trace_depth: self.max_trace_depth, toolkit: self.toolkit.clone() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Report Blob Listeners.
    Detect {
        #[command(flatten)]
        common: Common,
        /// Show the evidence behind every command.
        #[arg(long)]
        explain: bool,
        /// Omit timing figures (for reproducible output).
        #[arg(long)]
        no_timing: bool,
        /// Emit the control-flow graph of each conditional listener (DOT).
        #[arg(long)]
        cfg_dump: bool,
    },
    /// Distribution of listeners by number of commands.
    Stats {
        #[command(flatten)]
        common: Common,
    },
    /// Compare detection against an annotation file.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Tab-separated annotation file
        #[arg(long)]
        ground_truth: PathBuf,
    },
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Detect { common, explain, no_timing, cfg_dump } => {
            let opts = RunOptions { explain, timing: !no_timing, cfg_dump };
            let report = run_detect(&common.root, &common.config(), &opts)?;
            match common.format {
                Format::Text => print!("{}", render_text(&report)),
                Format::Json => print!("{}", render_json(&report)),
            }
            Ok(if report.findings.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Stats { common } => {
            let dist = run_stats(&common.root, &common.config())?;
            match common.format {
                Format::Text => print!("{}", render_stats_text(&dist)),
                Format::Json => print!("{}", render_json(&dist)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { common, ground_truth } => {
            let truth = load_ground_truth(&ground_truth)?;
            let report = run_detect(&common.root, &common.config(), &RunOptions::default())?;
            let result = evaluate(&report, &truth)?;
            match common.format {
                Format::Text => print!("{}", render_eval_text(&result)),
                Format::Json => print!("{}", render_json(&result)),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
