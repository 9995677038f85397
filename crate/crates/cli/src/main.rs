mod lab;
mod manifest;
mod report;
mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use manifest::{sha256_hex, write_atomic, OutputRecord, RunManifest};

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_UNCERTIFIED: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "addicone", version, about = "Uniform additivity cones of entropic channel formulas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    #[value(alias = "md")]
    Markdown,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Markdown => "md",
            Format::Csv => "csv",
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render a cone or table.
    Report {
        /// zero-var, one-var:ALL, one-var:a,b, multi-var:n,code, decouplings, esv-tables
        target: String,
        #[arg(long, value_enum, default_value = "markdown")]
        format: Format,
        /// Write files and a manifest here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of auxiliary variables for `decouplings`.
        #[arg(long)]
        aux: Option<usize>,
        /// Code for `one-var`, e.g. 3,1.
        #[arg(long)]
        class: Option<String>,
    },
    /// Run verification suites.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numeric experiments on channels and states.
    Lab {
        #[command(subcommand)]
        command: lab::LabCommand,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Re-run the command of a manifest and compare output hashes.
    Replay { manifest: PathBuf },
}

pub struct Output {
    pub name: String,
    pub content: String,
}

struct Run {
    outputs: Vec<Output>,
    manifest: RunManifest,
    code: u8,
}

fn execute(command: &Command, args: Vec<String>) -> Result<Run> {
    match command {
        Command::Report { target, format, aux, class, .. } => {
            let t = report::Target::parse(target, class.as_deref(), *aux)?;
            let manifest = RunManifest::new(args, json!({ "target": target, "format": format, "aux": aux, "class": class }));
            let (out, ok) = report::run(&t, *format)?;
            Ok(Run { outputs: vec![out], manifest, code: if ok { 0 } else { EXIT_UNCERTIFIED } })
        }
        Command::Verify { suite, samples, seed, format, .. } => {
            let mut manifest =
                RunManifest::new(args, json!({ "suite": suite, "samples": samples, "seed": seed, "format": format }));
            manifest.seeds.push(*seed);
            let summary = verify::run(*suite, *samples, *seed)?;
            let content = match format {
                Format::Json => serde_json::to_string_pretty(&summary)? + "\n",
                Format::Markdown => verify::markdown(&summary),
                Format::Csv => bail!("verify summaries are json or markdown"),
            };
            let name = format!("verify-{}.{}", serde_json::to_value(suite)?.as_str().unwrap_or("suite"), format.extension());
            Ok(Run { outputs: vec![Output { name, content }], manifest, code: if summary.passed { 0 } else { EXIT_FAILED } })
        }
        Command::Lab { command, .. } => {
            let mut manifest = RunManifest::new(args, serde_json::to_value(command)?);
            let value = lab::run(command, &mut manifest)?;
            let name = match command {
                lab::LabCommand::Maximize { .. } => "lab-maximize.json",
                lab::LabCommand::Degradability { .. } => "lab-degradability.json",
                lab::LabCommand::SpotCheck { .. } => "lab-spot-check.json",
                lab::LabCommand::Cq { .. } => "lab-cq.json",
            };
            Ok(Run { outputs: vec![Output { name: name.into(), content: serde_json::to_string_pretty(&value)? + "\n" }], manifest, code: 0 })
        }
        Command::Replay { .. } => bail!("replay cannot be nested"),
    }
}

fn out_dir(command: &Command) -> Option<&Path> {
    match command {
        Command::Report { out, .. } | Command::Verify { out, .. } | Command::Lab { out, .. } => out.as_deref(),
        Command::Replay { .. } => None,
    }
}

fn emit(mut run: Run, dir: Option<&Path>) -> Result<u8> {
    match dir {
        Some(dir) => {
            for o in &run.outputs {
                write_atomic(&dir.join(&o.name), o.content.as_bytes())?;
                run.manifest.outputs.push(OutputRecord { path: o.name.clone(), sha256: sha256_hex(o.content.as_bytes()) });
            }
            let stem = run.outputs[0].name.rsplit_once('.').map_or(run.outputs[0].name.as_str(), |(s, _)| s).to_string();
            let m = serde_json::to_string_pretty(&run.manifest)? + "\n";
            write_atomic(&dir.join(format!("{stem}.manifest.json")), m.as_bytes())?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            for o in &run.outputs {
                stdout.write_all(o.content.as_bytes())?;
            }
        }
    }
    Ok(run.code)
}

fn replay(path: &Path) -> Result<u8> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let recorded: RunManifest = serde_json::from_str(&text)?;
    let cli = Cli::try_parse_from(std::iter::once("addicone".to_string()).chain(recorded.command.iter().cloned()))?;
    let run = execute(&cli.command, recorded.command.clone())?;
    let mut same = run.outputs.len() == recorded.outputs.len();
    for (o, r) in run.outputs.iter().zip(&recorded.outputs) {
        let h = sha256_hex(o.content.as_bytes());
        let ok = o.name == r.path && h == r.sha256;
        eprintln!("{} {} {}", if ok { "same" } else { "DIFFERS" }, o.name, h);
        same &= ok;
    }
    for (k, v) in &recorded.input_hashes {
        if run.manifest.input_hashes.get(k) != Some(v) {
            eprintln!("DIFFERS input {k}");
            same = false;
        }
    }
    Ok(if same { 0 } else { EXIT_FAILED })
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("ADDICONE_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).with_context(|| format!("ADDICONE_THREADS={v:?} is not a positive integer"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Replay { manifest } => replay(manifest),
        command => emit(execute(command, args)?, out_dir(command)),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
