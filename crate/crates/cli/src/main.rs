mod commands;
mod config;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;
use sha2::{Digest, Sha256};
use warpgeom::GeomError;

use config::{Args, Command, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Geom(GeomError),
    Io(String),
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        CliError::Geom(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Geom(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

fn config_hash(cfg: &RunConfig) -> String {
    let canonical = serde_json::to_string(cfg).expect("config serializes");
    Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn write_outputs(dir: &Path, cfg: &RunConfig, files: &[(String, String)]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let manifest = json!({
        "tool": "warpgeom",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cfg.command.name(),
        "config_hash": config_hash(cfg),
        "config": cfg,
        "outputs": files.iter().map(|(name, _)| name.as_str()).collect::<Vec<_>>(),
    });
    let mut manifest = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    manifest.push('\n');
    let all = files.iter().map(|(n, c)| (n.as_str(), c.as_str())).chain([("manifest.json", manifest.as_str())]);
    for (name, contents) in all {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn run(args: Args) -> Result<bool, CliError> {
    let cfg = RunConfig::from_args(args)?;
    let out = match cfg.command {
        Command::Info => commands::info(&cfg)?,
        Command::Regions => commands::regions(&cfg)?,
        Command::Verify => commands::verify(&cfg)?,
        Command::Monotonicity => commands::monotonicity(&cfg)?,
        Command::Asymptotics => commands::asymptotics(&cfg)?,
        Command::Sweep => commands::sweep(&cfg)?,
    };
    write_outputs(&cfg.out, &cfg, &out.files)?;
    Ok(out.violated)
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("at least one check was violated");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
