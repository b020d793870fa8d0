//! `macot`: reproducible experiments on oblivious transfer over noisy
//! channels. Every document embeds the tool version, the master seed and a
//! hash of the resolved configuration.

mod config;
mod run;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use config::{Command, ExperimentConfig, Format};
use run::{execute, Failure};

/// Environment variable holding the default master seed.
const SEED_ENV: &str = "MACOT_SEED";

#[derive(Debug, Parser)]
#[command(name = "macot", version, about = "Oblivious transfer over noisy multiple-access channels")]
struct Cli {
    /// Experiment document (TOML, or JSON for a `.json` path).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; falls back to the config document, then $MACOT_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the document here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

struct Resolved {
    command: Command,
    seed: u64,
    format: Format,
    output: Option<PathBuf>,
}

fn read_config(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn resolve(cli: Cli) -> Result<Resolved, Failure> {
    let (command, file_seed, file_format, file_output) = match (cli.config, cli.command) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give either --config or a subcommand, not both".into())),
        (None, None) => return Err(Failure::Usage("a subcommand or --config is required".into())),
        (None, Some(c)) => (c, None, None, None),
        (Some(path), None) => {
            let cfg = read_config(&path)?;
            (cfg.run, cfg.master_seed, cfg.format, cfg.output)
        }
    };
    let seed = match cli.seed.or(file_seed) {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    let format = cli.format.or(file_format).unwrap_or_default();
    if format == Format::Csv && !matches!(command, Command::Regions(_)) {
        return Err(Failure::Usage("comma-separated output is available for regions only".into()));
    }
    Ok(Resolved {
        command,
        seed,
        format,
        output: cli.output.or(file_output),
    })
}

fn config_hash(config: &Value, seed: u64) -> String {
    let canonical = serde_json::to_string(&json!({"config": config, "seed": seed})).expect("json");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

fn render(r: &Resolved) -> Result<(String, bool), Failure> {
    let outcome = execute(&r.command, r.seed)?;
    let config = serde_json::to_value(&r.command).expect("config serializes");
    let hash = config_hash(&config, r.seed);
    let version = env!("CARGO_PKG_VERSION");
    let text = match (r.format, &outcome.table) {
        (Format::Csv, Some((header, rows))) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).map_err(|e| Failure::Io(e.to_string()))?;
            for row in rows {
                w.write_record(row).map_err(|e| Failure::Io(e.to_string()))?;
            }
            let body = String::from_utf8(w.into_inner().map_err(|e| Failure::Io(e.to_string()))?).expect("utf8");
            format!("# tool=macot version={version} seed={} config_hash={hash}\n{body}", r.seed)
        }
        _ => {
            let doc = json!({
                "tool": "macot",
                "version": version,
                "command": r.command.name(),
                "seed": r.seed,
                "config_hash": hash,
                "config": config,
                "result": outcome.result,
            });
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
    };
    Ok((text, outcome.abort_dominated))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn fail(f: Failure) -> ExitCode {
    eprintln!("{}", serde_json::to_string(&f.document()).expect("json"));
    ExitCode::from(f.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(Failure::Usage(e.render().to_string().trim().to_string())),
    };
    let resolved = match resolve(cli) {
        Ok(r) => r,
        Err(f) => return fail(f),
    };
    match render(&resolved).and_then(|(text, dominated)| emit(&text, resolved.output.as_deref()).map(|_| dominated)) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(4),
        Err(f) => fail(f),
    }
}
