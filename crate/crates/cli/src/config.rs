use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use warpgeom::{ManifoldSpec, SubmanifoldFamily, Tolerances};

use crate::CliError;

pub const MIN_RESOLUTION: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Info,
    Regions,
    Verify,
    Monotonicity,
    Asymptotics,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Info => "info",
            Command::Regions => "regions",
            Command::Verify => "verify",
            Command::Monotonicity => "monotonicity",
            Command::Asymptotics => "asymptotics",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GrowthChoice {
    Exponential,
    Polynomial,
}

/// `param=lo:hi:count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub param: String,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Sweep {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("sweep '{text}' must look like param=lo:hi:count"));
        let (param, range) = text.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(Sweep {
            param: param.trim().to_string(),
            lo: parts[0].trim().parse().map_err(|_| bad())?,
            hi: parts[1].trim().parse().map_err(|_| bad())?,
            count: parts[2].trim().parse().map_err(|_| bad())?,
        })
    }

    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(CliError::Config(format!("sweep range requires lo < hi, got {}:{}", self.lo, self.hi)));
        }
        if self.count < 2 {
            return Err(CliError::Config(format!("sweep count must be at least 2, got {}", self.count)));
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        Ok((0..self.count).map(|i| self.lo + step * i as f64).collect())
    }
}

fn default_resolution() -> usize {
    4096
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_points() -> usize {
    64
}

fn default_count() -> usize {
    20
}

/// Complete description of one run; its JSON form is hashed into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub spec: ManifoldSpec<f64>,
    pub command: Command,
    #[serde(default)]
    pub mesh: Option<SubmanifoldFamily<f64>>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    /// Not part of the hashed configuration, so runs compare across directories.
    #[serde(default = "default_out", skip_serializing)]
    pub out: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Checks to run; empty means every applicable one.
    #[serde(default)]
    pub cases: Vec<String>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    /// Area-radius band `[s_a, s_b]` for the domain corollaries.
    #[serde(default)]
    pub band: Option<(f64, f64)>,
    #[serde(default)]
    pub force_minimal: bool,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub growth: Option<GrowthChoice>,
    /// Trace radii and curvature samples.
    #[serde(default = "default_points")]
    pub points: usize,
    /// Slices drawn by `verify` without a mesh.
    #[serde(default = "default_count")]
    pub count: usize,
}

#[derive(Debug, Parser)]
#[command(name = "warpgeom", version, about = "Isoperimetric and monotonicity checks in warped products")]
pub struct Args {
    /// JSON run configuration; other flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Manifold spec: a JSON file path or inline JSON.
    #[arg(long)]
    pub spec: Option<String>,
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    /// Submanifold family as inline JSON or a file path.
    #[arg(long)]
    pub mesh: Option<String>,
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance override `name=value` (eq_tol, check_tol); repeatable.
    #[arg(long = "tol")]
    pub tol: Vec<String>,
    /// Check to run (e.g. fundamental, ss_i, rn_ii_mod, hyperbolic, theo2_i, domain); repeatable.
    #[arg(long = "case")]
    pub cases: Vec<String>,
    /// Swept parameter `param=lo:hi:count` with param one of s, alpha, d.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Area-radius band `s_a:s_b` for the domain corollaries.
    #[arg(long)]
    pub band: Option<String>,
    /// Debug: overwrite the mesh curvature with zero.
    #[arg(long)]
    pub force_minimal: bool,
    /// Mean-curvature weight of the monotone functionals; defaults to k max|H|.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Fit the growth of the truncated volume.
    #[arg(long, value_enum)]
    pub growth: Option<GrowthChoice>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub count: Option<usize>,
}

fn inline_or_file(text: &str, what: &str) -> Result<String, CliError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        return Ok(text.to_string());
    }
    std::fs::read_to_string(Path::new(text)).map_err(|e| CliError::Config(format!("cannot read {what} file '{text}': {e}")))
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid {what}: {e}")))
}

fn parse_band(text: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Config(format!("band '{text}' must look like s_a:s_b"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

impl RunConfig {
    pub fn from_args(args: Args) -> Result<Self, CliError> {
        let mut value = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read config '{}': {e}", path.display())))?;
                parse_json::<serde_json::Value>(&text, "config")?
            }
            None => serde_json::json!({}),
        };
        let obj = value.as_object_mut().ok_or_else(|| CliError::Config("config must be a JSON object".into()))?;
        if let Some(spec) = &args.spec {
            obj.insert("spec".into(), parse_json(&inline_or_file(spec, "spec")?, "spec")?);
        }
        if let Some(mesh) = &args.mesh {
            obj.insert("mesh".into(), parse_json(&inline_or_file(mesh, "mesh")?, "mesh")?);
        }
        if let Some(c) = args.command {
            obj.insert("command".into(), serde_json::to_value(c).expect("enum serializes"));
        }
        if !obj.contains_key("spec") {
            return Err(CliError::Config("a manifold spec is required (--spec)".into()));
        }
        if !obj.contains_key("command") {
            return Err(CliError::Config("a command is required (--command)".into()));
        }
        let mut cfg: RunConfig = parse_json(&value.to_string(), "config")?;
        if let Some(r) = args.resolution {
            cfg.resolution = r;
        }
        if let Some(out) = args.out {
            cfg.out = out;
        }
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        for entry in &args.tol {
            let (name, v) = entry
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("tolerance '{entry}' must look like name=value")))?;
            let v: f64 = v.trim().parse().map_err(|_| CliError::Config(format!("tolerance '{entry}' is not a number")))?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("tolerance {name} must be positive, got {v}")));
            }
            match name.trim() {
                "eq_tol" => cfg.tolerances.eq_tol = v,
                "check_tol" => cfg.tolerances.check_tol = v,
                other => return Err(CliError::Config(format!("unknown tolerance '{other}' (eq_tol, check_tol)"))),
            }
        }
        if !args.cases.is_empty() {
            cfg.cases = args.cases;
        }
        if let Some(s) = &args.sweep {
            cfg.sweep = Some(Sweep::parse(s)?);
        }
        if let Some(b) = &args.band {
            cfg.band = Some(parse_band(b)?);
        }
        cfg.force_minimal |= args.force_minimal;
        if args.alpha.is_some() {
            cfg.alpha = args.alpha;
        }
        if args.growth.is_some() {
            cfg.growth = args.growth;
        }
        if let Some(p) = args.points {
            cfg.points = p;
        }
        if let Some(c) = args.count {
            cfg.count = c;
        }
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        if self.resolution < MIN_RESOLUTION {
            return Err(CliError::Config(format!("resolution must be >= {MIN_RESOLUTION}, got {}", self.resolution)));
        }
        if self.points < 4 {
            return Err(CliError::Config(format!("points must be >= 4, got {}", self.points)));
        }
        if self.count == 0 {
            return Err(CliError::Config("count must be positive".into()));
        }
        self.spec.validate().map_err(CliError::Geom)?;
        Ok(())
    }
}
