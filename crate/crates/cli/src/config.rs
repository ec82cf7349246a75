//! Flags, the `key = value` config file, and their merge.
//!
//! Config file grammar: one `key = value` per line; keys are long flag names
//! without the leading `--`; blank lines and lines starting with `#` are
//! ignored; a key may appear at most once. Boolean switches take `true` or
//! `false`. Flags given on the command line win over the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wring::hamiltonian::ModelParams;

use crate::error::{CliError, CliResult};
use crate::output::{Format, Table};

#[derive(Debug, Parser)]
#[command(name = "wring", version, about = "Exact diagonalization experiments on XX/XXZ spin rings")]
pub struct Cli {
    #[command(flatten)]
    pub globals: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Model family; `xx` fixes Δ = −J.
    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelKind>,
    /// Number of sites (N ≥ 3).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// In-plane coupling J.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub j: Option<f64>,
    /// Anisotropy Δ (z coupling is J + Δ).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Longitudinal field B.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Transverse field B′ ≥ 0.
    #[arg(long = "b-perp", global = true)]
    pub b_perp: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: all cores). Never changes the output.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// `key = value` file with defaults for any long flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Xx,
    Xxz,
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <ModelKind as ValueEnum>::from_str(s, true)
    }
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Xx => "xx",
            ModelKind::Xxz => "xxz",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues, per sector when B′ = 0, with analytic values where known.
    Spectrum(SpectrumArgs),
    /// Ground-state energy, sector, W fidelity and gap over a field grid.
    Scan(ScanArgs),
    /// Fields where neighbouring sector minima cross.
    Crossing(CrossingArgs),
    /// Minimum avoided-crossing gap against 2B′√N.
    Gap(GapArgs),
    /// Field ramp from |0…0⟩ and the resulting W fidelity.
    Sweep(SweepArgs),
    /// Gibbs-state W overlap, witness and the two-level model.
    Thermal(ThermalArgs),
    /// Pair concurrences or the biseparability scan.
    Entangle(EntangleArgs),
    /// Check every registered closed-form claim against exact diagonalization.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Scan(_) => "scan",
            Command::Crossing(_) => "crossing",
            Command::Gap(_) => "gap",
            Command::Sweep(_) => "sweep",
            Command::Thermal(_) => "thermal",
            Command::Entangle(_) => "entangle",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct SpectrumArgs {
    /// Restrict to one excitation sector.
    #[arg(long)]
    pub sector: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScanArgs {
    #[arg(long = "b-from", allow_hyphen_values = true)]
    pub b_from: Option<f64>,
    #[arg(long = "b-to", allow_hyphen_values = true)]
    pub b_to: Option<f64>,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Also emit the lowest this-many levels.
    #[arg(long)]
    pub levels: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    FreeFermion,
    SectorEd,
}

impl FromStr for SourceArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <SourceArg as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CrossingArgs {
    /// Lower sector of the pair (m → m+1); all pairs if omitted.
    #[arg(long)]
    pub m: Option<usize>,
    /// How sector minima are computed (default: free fermions for XX).
    #[arg(long, value_enum)]
    pub source: Option<SourceArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GapArgs {
    #[arg(long = "window-lo", allow_hyphen_values = true)]
    pub window_lo: Option<f64>,
    #[arg(long = "window-hi", allow_hyphen_values = true)]
    pub window_hi: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    #[arg(long = "b-start", allow_hyphen_values = true)]
    pub b_start: Option<f64>,
    #[arg(long = "b-end", allow_hyphen_values = true)]
    pub b_end: Option<f64>,
    /// Ramp duration; derived from --lz-target when omitted.
    #[arg(long)]
    pub time: Option<f64>,
    /// Landau–Zener diabatic probability the duration is chosen for.
    #[arg(long = "lz-target")]
    pub lz_target: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "record-every")]
    pub record_every: Option<usize>,
    /// Emit the sampled time series instead of a one-row summary.
    #[arg(long)]
    pub series: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ThermalArgs {
    /// Inverse temperature β.
    #[arg(long, conflicts_with = "kt")]
    pub beta: Option<f64>,
    /// Temperature kT (β = 1/kT).
    #[arg(long)]
    pub kt: Option<f64>,
    /// Comma-separated list of fields; defaults to --b.
    #[arg(long = "b-values", allow_hyphen_values = true, value_delimiter = ',')]
    pub b_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EntangleTable {
    Pairs,
    Biseparability,
}

impl FromStr for EntangleTable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <EntangleTable as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateChoice {
    W,
    Ground,
}

impl FromStr for StateChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <StateChoice as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct EntangleArgs {
    #[arg(long, value_enum)]
    pub table: Option<EntangleTable>,
    /// State whose pair concurrences are tabulated.
    #[arg(long, value_enum)]
    pub state: Option<StateChoice>,
    /// Comma-separated α grid for the biseparability scan.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Largest ring used in the ED sweeps.
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
}

const KNOWN_KEYS: &[&str] = &[
    "model", "n", "j", "delta", "b", "b-perp", "format", "output", "threads",
    "sector", "b-from", "b-to", "steps", "levels", "m", "source", "lo", "hi",
    "window-lo", "window-hi", "b-start", "b-end", "time", "lz-target", "dt",
    "record-every", "series", "beta", "kt", "b-values", "table", "state", "alphas", "n-max",
];

/// Parsed config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim().trim_start_matches("--").to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::Usage(format!(
                    "config line {}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The flag if given, else the file entry, else `None`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}"))),
        }
    }

    /// Comma-separated list entry.
    pub fn pick_list<T: FromStr>(&self, flag: Option<Vec<T>>, key: &str) -> CliResult<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))
                })
                .collect::<CliResult<Vec<T>>>()
                .map(Some),
        }
    }

    /// Boolean switch: true if the flag is set or the file says `true`.
    pub fn switch(&self, flag: bool, key: &str) -> CliResult<bool> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

/// Resolved global settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelKind,
    pub params: ModelParams,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
    pub file: ConfigFile,
}

impl RunConfig {
    pub fn resolve(globals: &GlobalArgs) -> CliResult<Self> {
        let file = match &globals.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let model = file.pick(globals.model, "model")?.unwrap_or(ModelKind::Xxz);
        let n = file.pick(globals.n, "n")?.unwrap_or(3);
        let j = file.pick(globals.j, "j")?.unwrap_or(-1.0);
        let delta = file.pick(globals.delta, "delta")?;
        let b = file.pick(globals.b, "b")?.unwrap_or(0.0);
        let b_perp = file.pick(globals.b_perp, "b-perp")?.unwrap_or(0.0);
        let delta = match (model, delta) {
            (ModelKind::Xx, Some(d)) if d != -j => {
                return Err(CliError::Usage(format!(
                    "--model xx fixes delta = -j = {}, got {d}",
                    -j
                )))
            }
            (ModelKind::Xx, _) => -j,
            (ModelKind::Xxz, d) => d.unwrap_or(1.0),
        };
        let params = ModelParams::new(n, j, delta, b, b_perp)?;
        let threads = file.pick(globals.threads, "threads")?;
        if threads == Some(0) {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        Ok(Self {
            model,
            params,
            format: file.pick(globals.format, "format")?.unwrap_or(Format::Csv),
            output: file.pick(globals.output.clone(), "output")?,
            threads,
            file,
        })
    }

    /// A table whose metadata echoes the tool version, command and model.
    pub fn table(&self, command: &str, columns: &[&str]) -> Table {
        let p = &self.params;
        let mut t = Table::new(columns);
        t.meta("tool", concat!("wring ", env!("CARGO_PKG_VERSION")))
            .meta("command", command)
            .meta("model", self.model.name())
            .meta("n", p.n_sites())
            .meta("j", p.j_xy())
            .meta("delta", p.delta())
            .meta("b", p.b_field())
            .meta("b_perp", p.b_perp());
        t
    }
}
