use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use schober_cli::views::{skeleton_view, FanView};
use schober_cli::{load, plot, CliError, RunOptions};

#[derive(Parser)]
#[command(name = "schober", version, about = "Verify toric flop schobers from a manifest")]
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
    /// Manifest file (TOML).
    manifest: PathBuf,
    /// Character window radius, overriding the manifest.
    #[arg(long)]
    window: Option<i64>,
    /// Half side of the sheaf box, overriding the manifest.
    #[arg(long = "box")]
    box_size: Option<i64>,
    /// Stop at the first task that does not pass.
    #[arg(long)]
    fail_fast: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of the manifest.
    Run(Common),
    /// Run fan tasks, or print one fan as JSON.
    Fan {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        show: Option<String>,
    },
    /// Run skeleton tasks, or print one skeleton as JSON.
    Skeleton {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        show: Option<String>,
    },
    /// Run sheaf tasks.
    Sheaf(Common),
    /// Run coherent-constructible comparison tasks.
    Ccc(Common),
    /// Run schober tasks.
    Schober(Common),
    /// Draw a rank-2 skeleton as SVG.
    Plot {
        #[command(flatten)]
        common: Common,
        /// Name of the skeleton in the manifest.
        skeleton: String,
        /// Output file; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn options(c: &Common, module: Option<&str>) -> RunOptions {
    RunOptions { window: c.window, r#box: c.box_size, fail_fast: c.fail_fast, module: module.map(str::to_string) }
}

fn run_checks(c: &Common, module: Option<&str>) -> Result<ExitCode> {
    let report = load(&c.manifest)?.run(&options(c, module))?;
    match c.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => print!("{}", report.to_json()),
    }
    Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn unknown(kind: &str, name: &str) -> CliError {
    CliError::Validation { location: schober_cli::Location::file("<command line>"), message: format!("unknown {kind} `{name}`") }
}

fn dispatch(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Run(c) => run_checks(c, None),
        Command::Sheaf(c) => run_checks(c, Some("sheaf")),
        Command::Ccc(c) => run_checks(c, Some("ccc")),
        Command::Schober(c) => run_checks(c, Some("schober")),
        Command::Fan { common, show: None } => run_checks(common, Some("fan")),
        Command::Skeleton { common, show: None } => run_checks(common, Some("skeleton")),
        Command::Fan { common, show: Some(name) } => {
            let ws = load(&common.manifest)?.workspace(&options(common, None))?;
            let fan = ws.fans.get(name).ok_or_else(|| unknown("fan", name))?;
            println!("{}", serde_json::to_string_pretty(&FanView::of(fan)).expect("view serializes"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Skeleton { common, show: Some(name) } => {
            let ws = load(&common.manifest)?.workspace(&options(common, None))?;
            let sk = ws.skeleta.get(name).ok_or_else(|| unknown("skeleton", name))?;
            println!("{}", serde_json::to_string_pretty(&skeleton_view(sk)).expect("view serializes"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot { common, skeleton, output } => {
            let ws = load(&common.manifest)?.workspace(&options(common, None))?;
            let sk = ws.skeleta.get(skeleton).ok_or_else(|| unknown("skeleton", skeleton))?;
            let svg = plot::skeleton_svg(sk).map_err(CliError::from)?;
            match output {
                Some(p) => std::fs::write(p, svg).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{svg}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            // input problems exit with 2, failed computations with 1
            let code = e.downcast_ref::<CliError>().map_or(2, CliError::exit_code);
            ExitCode::from(code)
        }
    }
}
