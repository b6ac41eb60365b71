//! Run configuration: TOML parsing, defaults and grid validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::proof_constants::Exponents;

/// Batch command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    CertifyBarrier,
    CertifyBochner,
    SolveHj,
    SolvePharmonic,
    CheckEstimates,
    Liouville,
    Harnack,
    Ledger,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::CertifyBarrier,
        Command::CertifyBochner,
        Command::SolveHj,
        Command::SolvePharmonic,
        Command::CheckEstimates,
        Command::Liouville,
        Command::Harnack,
        Command::Ledger,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::CertifyBarrier => "certify-barrier",
            Command::CertifyBochner => "certify-bochner",
            Command::SolveHj => "solve-hj",
            Command::SolvePharmonic => "solve-pharmonic",
            Command::CheckEstimates => "check-estimates",
            Command::Liouville => "liouville",
            Command::Harnack => "harnack",
            Command::Ledger => "ledger",
        }
    }

    /// Grid axes the command enumerates, in enumeration order.
    pub fn axes(self) -> &'static [Axis] {
        use Axis::*;
        match self {
            Command::CertifyBarrier | Command::CheckEstimates | Command::Ledger => &[N, P, Q, B, R],
            Command::CertifyBochner => &[N, P, Q],
            Command::SolveHj => &[N, P, Q, B, S0],
            Command::SolvePharmonic | Command::Harnack => &[N, P, B],
            Command::Liouville => &[N, P, Q, S0],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    N,
    P,
    Q,
    B,
    R,
    S0,
}

/// Geometry used by the solve commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Euclidean,
    Hyperbolic,
    LogModel,
}

impl FromStr for ModelChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(ModelChoice::Euclidean),
            "hyperbolic" => Ok(ModelChoice::Hyperbolic),
            "log_model" => Ok(ModelChoice::LogModel),
            _ => Err(Error::Parse(format!("unknown model `{s}` (expected euclidean, hyperbolic or log_model)"))),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n: Option<Vec<usize>>,
    p: Option<Vec<f64>>,
    q: Option<Vec<f64>>,
    #[serde(rename = "B")]
    b: Option<Vec<f64>>,
    #[serde(rename = "R")]
    r: Option<Vec<f64>>,
    s0: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTol {
    ode: Option<f64>,
    energy: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Option<String>,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    tol: RawTol,
    grid_points: Option<usize>,
    seed: Option<u64>,
    out_dir: Option<String>,
    emit_svg: Option<bool>,
    model: Option<String>,
    r0: Option<f64>,
    r_max: Option<f64>,
    annulus: Option<[f64; 2]>,
    boundary: Option<[f64; 2]>,
}

/// Parameter grids; every axis is nonempty after defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub n: Vec<usize>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub b: Vec<f64>,
    pub r: Vec<f64>,
    pub s0: Vec<f64>,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub grid: Grid,
    pub tol_ode: f64,
    pub tol_energy: f64,
    /// Radius-grid size, random sample count or mesh size, depending on the command.
    pub grid_points: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub emit_svg: bool,
    pub model: ModelChoice,
    pub r0: f64,
    pub r_max: f64,
    pub annulus: (f64, f64),
    pub boundary: (f64, f64),
}

/// One grid point. Axes the command does not use keep their first value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseParams {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub b: f64,
    pub r: f64,
    pub s0: f64,
}

impl RunConfig {
    /// Grid points in lexicographic order over the command's axes.
    pub fn cases(&self) -> Vec<CaseParams> {
        let g = &self.grid;
        let axes = self.command.axes();
        let uses = |a: Axis| axes.contains(&a);
        let pick = |a: Axis, v: &[f64]| if uses(a) { v.to_vec() } else { vec![v[0]] };
        let ns = if uses(Axis::N) { g.n.clone() } else { vec![g.n[0]] };
        let mut out = Vec::new();
        for &n in &ns {
            for &p in &pick(Axis::P, &g.p) {
                let qs = if uses(Axis::Q) { g.q.clone() } else { vec![p] };
                for &q in &qs {
                    for &b in &pick(Axis::B, &g.b) {
                        for &r in &pick(Axis::R, &g.r) {
                            for &s0 in &pick(Axis::S0, &g.s0) {
                                out.push(CaseParams { n, p, q, b, r, s0 });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Reads and validates a configuration file. A command given on the command
/// line must agree with the file's `command`, and supplies it when absent.
pub fn parse_config(path: &Path, cli_command: Option<Command>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text, cli_command)
}

/// Parses and validates configuration text.
pub fn parse_config_str(text: &str, cli_command: Option<Command>) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let at = |key: &str| match line_of(text, key) {
        Some(l) => format!("`{key}` (line {l})"),
        None => format!("`{key}`"),
    };
    let invalid = |key: &str, msg: String| Error::Validation(format!("{}: {msg}", at(key)));

    let command = match (&raw.command, cli_command) {
        (Some(c), cli) => {
            let parsed: Command = c.parse().map_err(|_| invalid("command", format!("unknown command `{c}`")))?;
            if let Some(cli) = cli.filter(|&cli| cli != parsed) {
                return Err(invalid("command", format!("file selects `{parsed}` but `{cli}` was requested")));
            }
            parsed
        }
        (None, Some(cli)) => cli,
        (None, None) => return Err(Error::Validation("missing `command`".into())),
    };
    let grid_points = raw.grid_points.unwrap_or(match command {
        Command::CertifyBochner => 100_000,
        Command::SolvePharmonic => 1 << 14,
        _ => 10_000,
    });
    let model: ModelChoice = match &raw.model {
        Some(m) => m.parse().map_err(|e: Error| invalid("model", e.to_string()))?,
        None => ModelChoice::Hyperbolic,
    };
    let default_r0 = if model == ModelChoice::LogModel || command == Command::Liouville { 0.0 } else { 1.0 };
    let default_r_max = if command == Command::Liouville { 1e6 } else { 10.0 };
    let cfg = RunConfig {
        command,
        grid: Grid {
            n: raw.grid.n.unwrap_or_else(|| vec![3]),
            p: raw.grid.p.unwrap_or_else(|| vec![2.0]),
            q: raw.grid.q.unwrap_or_else(|| vec![2.0]),
            b: raw.grid.b.unwrap_or_else(|| vec![1.0]),
            r: raw.grid.r.unwrap_or_else(|| vec![1.0]),
            s0: raw.grid.s0.unwrap_or_else(|| vec![1.0]),
        },
        tol_ode: raw.tol.ode.unwrap_or(1e-10),
        tol_energy: raw.tol.energy.unwrap_or(1e-14),
        grid_points,
        seed: raw.seed.unwrap_or(0),
        out_dir: PathBuf::from(raw.out_dir.unwrap_or_else(|| "hjlab-out".into())),
        emit_svg: raw.emit_svg.unwrap_or(false),
        model,
        r0: raw.r0.unwrap_or(default_r0),
        r_max: raw.r_max.unwrap_or(default_r_max),
        annulus: raw.annulus.map(|a| (a[0], a[1])).unwrap_or((0.5, 2.0)),
        boundary: raw.boundary.map(|a| (a[0], a[1])).unwrap_or((1.0, 0.0)),
    };
    validate(&cfg, &invalid)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig, invalid: &dyn Fn(&str, String) -> Error) -> Result<()> {
    let g = &cfg.grid;
    let nonempty = [
        ("grid.n", g.n.is_empty()),
        ("grid.p", g.p.is_empty()),
        ("grid.q", g.q.is_empty()),
        ("grid.B", g.b.is_empty()),
        ("grid.R", g.r.is_empty()),
        ("grid.s0", g.s0.is_empty()),
    ];
    if let Some((key, _)) = nonempty.iter().find(|(_, empty)| *empty) {
        return Err(invalid(key, "grid must be nonempty".into()));
    }
    let all_finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
    if let Some(&n) = g.n.iter().find(|&&n| n < 2) {
        return Err(invalid("grid.n", format!("dimension {n} must be >= 2")));
    }
    if !all_finite(&g.p) || g.p.iter().any(|&p| !(p > 1.0)) {
        return Err(invalid("grid.p", "constraint p-1 > 0 violated".into()));
    }
    if !all_finite(&g.q) {
        return Err(invalid("grid.q", "values must be finite".into()));
    }
    if cfg.command.axes().contains(&Axis::Q) {
        for &p in &g.p {
            for &q in &g.q {
                if Exponents::new(p, q).is_err() {
                    return Err(invalid("grid.q", format!("grid point p = {p}, q = {q} violates the constraint q > p-1")));
                }
            }
        }
    }
    if !all_finite(&g.b) || g.b.iter().any(|&b| !(b >= 0.0)) {
        return Err(invalid("grid.B", "curvature scales must be >= 0".into()));
    }
    if !all_finite(&g.r) || g.r.iter().any(|&r| !(r > 0.0)) {
        return Err(invalid("grid.R", "ball radii must be > 0".into()));
    }
    if !all_finite(&g.s0) || g.s0.iter().any(|&s| !(s >= 0.0)) {
        return Err(invalid("grid.s0", "initial slopes must be >= 0".into()));
    }
    if cfg.command == Command::Liouville && g.s0.contains(&0.0) {
        return Err(invalid("grid.s0", "the Liouville sweep needs positive initial slopes".into()));
    }
    if !(cfg.tol_ode > 0.0 && cfg.tol_ode.is_finite()) {
        return Err(invalid("tol.ode", "tolerance must be > 0".into()));
    }
    if !(cfg.tol_energy > 0.0 && cfg.tol_energy.is_finite()) {
        return Err(invalid("tol.energy", "tolerance must be > 0".into()));
    }
    if cfg.grid_points == 0 {
        return Err(invalid("grid_points", "must be > 0".into()));
    }
    if cfg.command == Command::SolvePharmonic && cfg.grid_points < 16 {
        return Err(invalid("grid_points", "mesh size must be >= 16".into()));
    }
    if !(cfg.r_max > cfg.r0) || !cfg.r_max.is_finite() || !cfg.r0.is_finite() {
        return Err(invalid("r_max", format!("r_max = {} must exceed r0 = {}", cfg.r_max, cfg.r0)));
    }
    if cfg.model != ModelChoice::LogModel && cfg.command != Command::Liouville && !(cfg.r0 > 0.0) {
        return Err(invalid("r0", "radial models need r0 > 0".into()));
    }
    let (ra, rb) = cfg.annulus;
    if !(rb > ra) || (cfg.model != ModelChoice::LogModel && !(ra > 0.0)) {
        return Err(invalid("annulus", format!("annulus [{ra}, {rb}] is invalid")));
    }
    if !cfg.boundary.0.is_finite() || !cfg.boundary.1.is_finite() {
        return Err(invalid("boundary", "values must be finite".into()));
    }
    Ok(())
}

/// Line number (1-based) on which a possibly dotted key is assigned.
fn line_of(text: &str, key: &str) -> Option<usize> {
    let (table, leaf) = match key.rsplit_once('.') {
        Some((t, l)) => (t, l),
        None => ("", key),
    };
    let mut current = String::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if let Some(h) = t.strip_prefix('[').and_then(|h| h.strip_suffix(']')) {
            current = h.trim().to_string();
            continue;
        }
        let Some((lhs, _)) = t.split_once('=') else { continue };
        let lhs = lhs.trim().trim_matches('"');
        let full = if current.is_empty() { lhs.to_string() } else { format!("{current}.{lhs}") };
        if full == key || (current == table && lhs == leaf) {
            return Some(i + 1);
        }
    }
    None
}
