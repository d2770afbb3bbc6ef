//! Command-line front end: flag and config-file parsing, grid sweeps and
//! deterministic CSV/JSON output.

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{Map, Value};

use crate::channel::{
    lemma1_empirical, lemma1_target, lemma2_empirical, lemma2_target, phi_at_distance, ChannelParams,
    CompositeGainDist, RateFactors,
};
use crate::error::Error;
use crate::hard_fairness::{mc_ebn0, sc_ebn0, spectral_efficiency_limit};
use crate::numerics::{hurwitz_zeta, linspace, logspace, QuadratureSpec};
use crate::partial_reuse::{PartialReuseModel, DUTY_CYCLE_NOTE};
use crate::pfs::{
    average_interference, lower_bound, pfs_capacity_limit, simulate_pfs_sweep, upper_bound, PfsSimConfig,
    SelectionRule,
};
use crate::simplified::{beta_effective, classify_regime, simplified_mc_ebn0};

/// Constant `beta` used by `simplified` when none is given.
pub const DEFAULT_BETA: f64 = 1.1;
const EBN0_NOTE: &str = "sys (total energy per cell over N0 times total bits per cell)";

#[derive(Debug, Parser)]
#[command(name = "linecell", version, about = "Spectral efficiency vs. system Eb/N0 on a linear cell array")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Single-cell and multi-cell Eb/N0 over a grid of spectral efficiencies.
    HfCurve,
    /// Spectral-efficiency limit C0 of the delay-limited system.
    HfLimit,
    /// Effective interference ratio beta and its bounds.
    Beta,
    /// Proportional-interference model with a constant beta.
    Simplified,
    /// Partial-reuse Eb/N0 over grids of spectral efficiency and reuse radius.
    PartialSweep,
    /// Optimal reuse radius per spectral efficiency.
    PartialOpt,
    /// Proportional-fair scheduling simulation on a ring of cells.
    PfsSim,
    /// Analytic envelope and high-SNR limit of proportional-fair scheduling.
    PfsBounds,
    /// Runs the self-consistency checks; exits with status 3 on any failure.
    Validate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::HfCurve => "hf-curve",
            Command::HfLimit => "hf-limit",
            Command::Beta => "beta",
            Command::Simplified => "simplified",
            Command::PartialSweep => "partial-sweep",
            Command::PartialOpt => "partial-opt",
            Command::PfsSim => "pfs-sim",
            Command::PfsBounds => "pfs-bounds",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    Asymptotic,
    Literal,
}

impl From<Rule> for SelectionRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Asymptotic => SelectionRule::AsymptoticMaxFading,
            Rule::Literal => SelectionRule::LiteralPfs,
        }
    }
}

/// Every option is optional so that flags can be layered over a config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Path-loss exponent.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Base-station spacing.
    #[arg(long = "D", global = true)]
    pub d: Option<f64>,
    /// Forbidden radius around each base station.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Number of subchannels.
    #[arg(long = "M", global = true)]
    pub m: Option<usize>,
    /// Users per cell.
    #[arg(long = "K", global = true)]
    pub k: Option<usize>,
    /// Spectral-efficiency grid.
    #[arg(long, num_args = 3, value_names = ["MIN", "MAX", "POINTS"], allow_negative_numbers = true, global = true)]
    pub c: Option<Vec<f64>>,
    /// Reuse-radius grid.
    #[arg(long, num_args = 3, value_names = ["MIN", "MAX", "POINTS"], allow_negative_numbers = true, global = true)]
    pub r0: Option<Vec<f64>>,
    /// Transmit SNR grid in dB.
    #[arg(long = "rho-db", num_args = 3, value_names = ["MIN", "MAX", "POINTS"], allow_negative_numbers = true, global = true)]
    pub rho_db: Option<Vec<f64>>,
    /// Spacing of the c and r0 grids.
    #[arg(long, value_enum, global = true)]
    pub scale: Option<Scale>,
    /// Constant beta for `simplified`.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Slots per macro-trial, burn-in included.
    #[arg(long, global = true)]
    pub slots: Option<usize>,
    /// Ring size.
    #[arg(long, global = true)]
    pub cells: Option<usize>,
    /// Proportional-fair averaging window in slots.
    #[arg(long, global = true)]
    pub tc: Option<f64>,
    /// Independent user placements.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Subchannels simulated.
    #[arg(long, global = true)]
    pub msub: Option<usize>,
    #[arg(long, value_enum, global = true)]
    pub rule: Option<Rule>,
    /// Monte Carlo draws for the sampled bound terms.
    #[arg(long = "mc-samples", global = true)]
    pub mc_samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Quadrature tolerance for the delay-limited commands.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// `key = value` file with the same keys as the flags; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(no_binary_name = true)]
struct FileFlags {
    #[command(flatten)]
    flags: Flags,
}

impl Flags {
    fn or(self, base: Flags) -> Flags {
        macro_rules! pick {
            ($($f:ident),*) => { Flags { $($f: self.$f.or(base.$f)),* } };
        }
        pick!(alpha, d, delta, m, k, c, r0, rho_db, scale, beta, slots, cells, tc, trials, msub, rule, mc_samples, seed, tol, out, format, config)
    }
}

/// Parses `key = value` lines (`#` starts a comment) into flags.
pub fn parse_config(text: &str) -> Result<Flags, CliError> {
    let mut args: Vec<String> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", n + 1)))?;
        let key = key.trim();
        if key == "config" {
            return Err(CliError::Usage("config files cannot include other config files".into()));
        }
        args.push(format!("--{key}"));
        args.extend(value.split_whitespace().map(str::to_owned));
    }
    FileFlags::try_parse_from(args)
        .map(|f| f.flags)
        .map_err(|e| CliError::Usage(format!("config: {}", e.to_string().lines().next().unwrap_or(""))))
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(Error),
    Io(std::io::Error),
    /// Number of failed `validate` checks; the report is still written.
    Validation(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Numerical(e) => write!(f, "numerical error: {e}"),
            CliError::Io(e) => write!(f, "error: {e}"),
            CliError::Validation(n) => write!(f, "validation failed: {n} check(s)"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(m) | Error::InvalidParams(m) => CliError::Usage(m),
            other => CliError::Numerical(other),
        }
    }
}

/// Axis of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    fn parse(name: &str, v: &[f64]) -> Result<Self, CliError> {
        let bad = |m: String| Err(CliError::Usage(format!("--{name}: {m}")));
        let &[min, max, pts] = v else { return bad("expected MIN MAX POINTS".into()) };
        if !(min.is_finite() && max.is_finite()) {
            return bad("bounds must be finite".into());
        }
        if !(pts >= 1.0 && pts.fract() == 0.0) {
            return bad(format!("points must be a positive integer, got {pts}"));
        }
        let points = pts as usize;
        if points == 1 && min != max {
            return bad("a single point needs MIN == MAX".into());
        }
        if points > 1 && !(min < max) {
            return bad("MIN must be below MAX".into());
        }
        Ok(Self { min, max, points })
    }

    fn values(&self, scale: Scale) -> Result<Vec<f64>, CliError> {
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        match scale {
            Scale::Linear => Ok(linspace(self.min, self.max, self.points)),
            Scale::Log if self.min > 0.0 => Ok(logspace(self.min, self.max, self.points)),
            Scale::Log => Err(CliError::Usage("log grids need a positive minimum".into())),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.min, self.max, self.points)
    }
}

/// Fully resolved request: defaults, then config file, then flags.
#[derive(Debug, Clone)]
pub struct Settings {
    pub command: Command,
    pub params: ChannelParams,
    pub k: usize,
    pub c: Grid,
    pub r0: Grid,
    pub rho_db: Grid,
    pub scale: Scale,
    pub beta: f64,
    pub slots: usize,
    pub cells: usize,
    pub tc: f64,
    pub trials: usize,
    pub msub: usize,
    pub rule: Rule,
    pub mc_samples: usize,
    pub seed: u64,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Settings {
    pub fn resolve(command: Command, flags: Flags) -> Result<Self, CliError> {
        let flags = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                flags.or(parse_config(&text)?)
            }
            None => flags,
        };
        let base = ChannelParams::default();
        let params = ChannelParams {
            alpha: flags.alpha.unwrap_or(base.alpha),
            d: flags.d.unwrap_or(base.d),
            delta: flags.delta.unwrap_or(base.delta),
            m: flags.m.unwrap_or(base.m),
        };
        params.validate()?;
        let default_c = match command {
            Command::PartialSweep | Command::PartialOpt => [4.0, 4.0, 1.0],
            _ => [0.1, 4.0, 40.0],
        };
        let grid = |name, v: &Option<Vec<f64>>, default: [f64; 3]| match v {
            Some(v) => Grid::parse(name, v),
            None => Grid::parse(name, &default),
        };
        let s = Self {
            command,
            params,
            k: flags.k.unwrap_or(10),
            c: grid("c", &flags.c, default_c)?,
            r0: grid("r0", &flags.r0, [params.delta, params.radius(), 33.0])?,
            rho_db: grid("rho-db", &flags.rho_db, [-10.0, 20.0, 4.0])?,
            scale: flags.scale.unwrap_or(Scale::Linear),
            beta: flags.beta.unwrap_or(DEFAULT_BETA),
            slots: flags.slots.unwrap_or(100_000),
            cells: flags.cells.unwrap_or(21),
            tc: flags.tc.unwrap_or(1000.0),
            trials: flags.trials.unwrap_or(100),
            msub: flags.msub.unwrap_or(1),
            rule: flags.rule.unwrap_or(Rule::Asymptotic),
            mc_samples: flags.mc_samples.unwrap_or(1_000_000),
            seed: flags.seed.unwrap_or(0),
            tol: flags.tol,
            out: flags.out,
            format: flags.format.unwrap_or(Format::Csv),
        };
        if let Some(t) = s.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(CliError::Usage(format!("--tol must lie in (0, 1), got {t}")));
            }
        }
        if s.k == 0 {
            return Err(CliError::Usage("--K must be at least 1".into()));
        }
        Ok(s)
    }

    fn dist(&self) -> Result<CompositeGainDist, CliError> {
        self.params.require_delay_limited()?;
        let dist = CompositeGainDist::full(&self.params)?;
        Ok(match self.tol {
            Some(t) => dist.with_spec(QuadratureSpec::with_tol(t)),
            None => dist,
        })
    }

    fn pfs_config(&self, rho: f64) -> PfsSimConfig {
        PfsSimConfig {
            n_slots: self.slots,
            n_cells: self.cells,
            trials: self.trials,
            m_sub: self.msub,
            seed: self.seed,
            ..PfsSimConfig::new(self.k, rho, self.rule.into())
        }
        .with_window(self.tc)
    }
}

/// One output value with its print precision.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Four decimals.
    Db(f64),
    /// Six decimals.
    Fine(f64),
    Int(u64),
    Text(String),
    Missing,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Db(v) => format!("{v:.4}"),
            Cell::Fine(v) => format!("{v:.6}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Db(v) | Cell::Fine(v) if v.is_finite() => {
                let rounded: f64 = self.text().parse().expect("formatted float");
                serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
            }
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            _ => Value::Null,
        }
    }
}

fn status(s: &str) -> Cell {
    Cell::Text(s.into())
}

/// A command's result before rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::text).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self) -> String {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), Value::from(v.as_str()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect()))
            .collect();
        let mut doc = Map::new();
        doc.insert("metadata".into(), Value::Object(meta));
        doc.insert("columns".into(), Value::from(self.columns.clone()));
        doc.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
        s.push('\n');
        s
    }
}

fn metadata(s: &Settings) -> Vec<(String, String)> {
    let p = &s.params;
    let mut m = vec![
        ("tool".into(), format!("linecell {}", env!("CARGO_PKG_VERSION"))),
        ("command".into(), s.command.name().into()),
        ("alpha".into(), p.alpha.to_string()),
        ("D".into(), p.d.to_string()),
        ("delta".into(), p.delta.to_string()),
        ("M".into(), p.m.to_string()),
        ("seed".into(), s.seed.to_string()),
    ];
    let mut push = |k: &str, v: String| m.push((k.into(), v));
    match s.command {
        Command::HfCurve | Command::HfLimit | Command::Beta | Command::Simplified => {
            push("tol", s.tol.map_or_else(|| "default".into(), |t| t.to_string()));
        }
        _ => {}
    }
    match s.command {
        Command::HfCurve | Command::Beta | Command::Simplified | Command::PartialSweep | Command::PartialOpt => {
            push("c_grid", format!("{} {:?}", s.c, s.scale).to_lowercase());
        }
        _ => {}
    }
    match s.command {
        Command::HfCurve | Command::Simplified | Command::PartialSweep | Command::PartialOpt => {
            push("ebn0", EBN0_NOTE.into());
        }
        Command::PfsSim | Command::PfsBounds => push("ebn0", EBN0_NOTE.into()),
        _ => {}
    }
    match s.command {
        Command::Simplified => push("beta", s.beta.to_string()),
        Command::PartialSweep => {
            push("r0_grid", format!("{} {:?}", s.r0, s.scale).to_lowercase());
            push("duty_cycle", DUTY_CYCLE_NOTE.into());
        }
        Command::PartialOpt => push("duty_cycle", DUTY_CYCLE_NOTE.into()),
        Command::PfsSim => {
            let cfg = s.pfs_config(1.0);
            push("K", s.k.to_string());
            push("rho_db_grid", s.rho_db.to_string());
            push("rule", format!("{:?}", s.rule).to_lowercase());
            push("slots", cfg.n_slots.to_string());
            push("burn_in", cfg.burn_in.to_string());
            push("cells", cfg.n_cells.to_string());
            push("tc", cfg.t_c.to_string());
            push("trials", cfg.trials.to_string());
            push("msub", cfg.m_sub.to_string());
        }
        Command::PfsBounds => {
            push("K", s.k.to_string());
            push("rho_db_grid", s.rho_db.to_string());
            push("cells", s.cells.to_string());
            push("mc_samples", s.mc_samples.to_string());
        }
        _ => {}
    }
    m
}

type Rows = Vec<Vec<Cell>>;

fn hf_curve(s: &Settings) -> Result<Rows, CliError> {
    let dist = s.dist()?;
    let p = s.params;
    s.c.values(s.scale)?
        .par_iter()
        .map(|&c| {
            let sc = sc_ebn0(c, &dist)?;
            let b = beta_effective(c, &dist, &p)?;
            let regime = classify_regime(sc.ebn0_linear, b.beta, c);
            let (mc, st) = match mc_ebn0(c, &dist, &p) {
                Ok(mc) => (Cell::Db(mc.ebn0_db), "ok"),
                Err(Error::LimitExceeded { .. }) => (Cell::Missing, "limit-exceeded"),
                Err(e) => return Err(e.into()),
            };
            Ok(vec![Cell::Fine(c), Cell::Db(sc.ebn0_db), mc, Cell::Fine(b.beta), Cell::Text(regime.to_string()), status(st)])
        })
        .collect()
}

fn hf_limit(s: &Settings) -> Result<Rows, CliError> {
    let c0 = spectral_efficiency_limit(&s.dist()?, &s.params)?;
    Ok(vec![vec![Cell::Int(s.params.m as u64), Cell::Fine(c0)]])
}

fn beta_rows(s: &Settings) -> Result<Rows, CliError> {
    let dist = s.dist()?;
    let p = s.params;
    s.c.values(s.scale)?
        .par_iter()
        .map(|&c| {
            let b = beta_effective(c, &dist, &p)?;
            let inside = b.beta >= b.lower && b.beta <= b.upper;
            Ok(vec![
                Cell::Fine(c),
                Cell::Fine(b.beta),
                Cell::Fine(b.lower),
                Cell::Fine(b.upper),
                status(if inside { "ok" } else { "out-of-bounds" }),
            ])
        })
        .collect()
}

fn simplified_rows(s: &Settings) -> Result<Rows, CliError> {
    let dist = s.dist()?;
    if !(s.beta >= 0.0) {
        return Err(CliError::Usage(format!("--beta must be non-negative, got {}", s.beta)));
    }
    s.c.values(s.scale)?
        .par_iter()
        .map(|&c| {
            let sc = sc_ebn0(c, &dist)?;
            let regime = classify_regime(sc.ebn0_linear, s.beta, c);
            let (v, st) = match simplified_mc_ebn0(c, s.beta, &dist) {
                Ok(op) => (Cell::Db(op.ebn0_db), "ok"),
                Err(Error::LimitExceeded { .. }) => (Cell::Missing, "limit-exceeded"),
                Err(e) => return Err(e.into()),
            };
            Ok(vec![Cell::Fine(c), Cell::Db(sc.ebn0_db), v, Cell::Text(regime.to_string()), status(st)])
        })
        .collect()
}

fn partial_sweep(s: &Settings) -> Result<Rows, CliError> {
    let model = PartialReuseModel::new(&s.params)?;
    let radii = s.r0.values(s.scale)?;
    let points: Vec<(f64, f64)> =
        s.c.values(s.scale)?.into_iter().flat_map(|c| radii.iter().map(move |&r| (c, r))).collect();
    points
        .par_iter()
        .map(|&(c, r0)| match model.state(c, r0) {
            Ok(st) => Ok(vec![
                Cell::Fine(c),
                Cell::Fine(r0),
                Cell::Db(st.point.ebn0_db),
                Cell::Fine(st.i0),
                Cell::Fine(st.i1),
                Cell::Fine(st.gamma0),
                Cell::Fine(st.gamma1),
                status("ok"),
            ]),
            Err(Error::LimitExceeded { .. }) => {
                let mut row = vec![Cell::Fine(c), Cell::Fine(r0)];
                row.extend(std::iter::repeat(Cell::Missing).take(5));
                row.push(status("limit-exceeded"));
                Ok(row)
            }
            Err(e) => Err(e.into()),
        })
        .collect()
}

fn partial_opt(s: &Settings) -> Result<Rows, CliError> {
    let model = PartialReuseModel::new(&s.params)?;
    let opt_db = |v: Option<f64>| v.map_or(Cell::Missing, Cell::Db);
    s.c.values(s.scale)?
        .iter()
        .map(|&c| match model.optimize_r0(c) {
            Ok(o) => {
                let db = o.state.point.ebn0_db;
                Ok(vec![
                    Cell::Fine(c),
                    Cell::Fine(o.r0),
                    Cell::Db(db),
                    opt_db(o.full_reuse_db),
                    opt_db(o.reuse2_db),
                    opt_db(o.full_reuse_db.map(|f| f - db)),
                    status("ok"),
                ])
            }
            Err(Error::LimitExceeded { .. }) => {
                let mut row = vec![Cell::Fine(c)];
                row.extend(std::iter::repeat(Cell::Missing).take(5));
                row.push(status("limit-exceeded"));
                Ok(row)
            }
            Err(e) => Err(e.into()),
        })
        .collect()
}

fn rhos(s: &Settings) -> Result<Vec<(f64, f64)>, CliError> {
    Ok(s.rho_db.values(Scale::Linear)?.into_iter().map(|db| (db, 10f64.powf(db / 10.0))).collect())
}

fn pfs_sim(s: &Settings) -> Result<Rows, CliError> {
    let grid = rhos(s)?;
    let linear: Vec<f64> = grid.iter().map(|g| g.1).collect();
    let results = simulate_pfs_sweep(&s.pfs_config(linear[0]), &linear, &s.params)?;
    Ok(grid
        .iter()
        .zip(results)
        .map(|(&(db, _), r)| {
            vec![
                Cell::Db(db),
                Cell::Fine(r.c_estimate),
                Cell::Fine(r.std_error),
                Cell::Db(r.ebn0_db),
                Cell::Fine(r.c_no_interference),
                Cell::Int(r.slots_used as u64),
                status("ok"),
            ]
        })
        .collect())
}

fn pfs_bounds(s: &Settings) -> Result<(Rows, (f64, f64)), CliError> {
    if s.mc_samples < 2 {
        return Err(CliError::Usage("--mc-samples must be at least 2".into()));
    }
    let limit = pfs_capacity_limit(s.k, &s.params, s.cells, s.mc_samples, s.seed)?;
    let rows = rhos(s)?
        .par_iter()
        .map(|&(db, rho)| {
            let lb = lower_bound(rho, s.k, &s.params)?;
            let ub = upper_bound(rho, s.k, &s.params, s.mc_samples, s.seed)?;
            Ok(vec![Cell::Db(db), Cell::Fine(lb), Cell::Fine(ub.mean), Cell::Fine(ub.std_error), status("ok")])
        })
        .collect::<Result<Rows, CliError>>()?;
    Ok((rows, (limit.mean, limit.std_error)))
}

/// One line of the `validate` report.
struct Check {
    name: &'static str,
    value: f64,
    reference: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    fn relative(name: &'static str, value: f64, reference: f64, tolerance: f64) -> Self {
        let pass = ((value - reference) / reference).abs() <= tolerance;
        Self { name, value, reference, tolerance, pass }
    }
}

/// Mean and standard error over repetitions.
fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

fn validate_checks(s: &Settings) -> Result<Vec<Check>, CliError> {
    let p = s.params;
    let mut out = Vec::new();

    let z = hurwitz_zeta(2.0, 1.0)?;
    out.push(Check::relative("zeta-basel", z, std::f64::consts::PI.powi(2) / 6.0, 1e-10));

    // kernel against its truncated two-sided sum plus an integral tail
    let (u, n) = (0.3 * p.radius(), 200_000);
    let mut direct = 0.0;
    for j in (1..=n).rev() {
        let jd = j as f64 * p.d;
        direct += (jd - u).powf(-p.alpha) + (jd + u).powf(-p.alpha);
    }
    direct += 2.0 * ((n as f64 + 0.5) * p.d).powf(1.0 - p.alpha) / ((p.alpha - 1.0) * p.d);
    out.push(Check::relative("phi-series", phi_at_distance(u, &p)?, direct, 1e-8));

    let i0 = average_interference(&p)?;
    let (r, delta, a) = (p.radius(), p.delta, p.alpha);
    let prim = |x: f64| x.powf(1.0 - a) / (a - 1.0);
    let mut series = 0.0;
    for j in (1..=n).rev() {
        let jd = j as f64 * p.d;
        series += prim(jd - r) - prim(jd - delta) + prim(jd + delta) - prim(jd + r);
    }
    let jd = (n as f64 + 0.5) * p.d;
    let anti = |c: f64| {
        if a == 2.0 {
            (jd + c).ln() / p.d
        } else {
            (jd + c).powf(2.0 - a) / (p.d * (2.0 - a) * (a - 1.0))
        }
    };
    series -= anti(-r) - anti(-delta) + anti(delta) - anti(r);
    out.push(Check::relative("average-interference", i0, series / (r - delta), 1e-6));

    if p.m >= 2 {
        let dist = CompositeGainDist::full(&p)?;
        let interval = (p.min_gain(), 50.0 * p.min_gain());
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        let reps = 40;
        let k = 20_000;
        let l1: Vec<f64> = (0..reps)
            .map(|_| lemma1_empirical(k, |x| x.ln(), interval, &dist, RateFactors::Uniform, &mut rng))
            .collect();
        let l2: Vec<f64> = (0..reps)
            .map(|_| lemma2_empirical(k, |s, _| s, interval, &dist, RateFactors::Uniform, &mut rng))
            .collect();
        for (name, xs, target) in [
            ("lemma1", l1, lemma1_target(|x| x.ln(), interval, &dist)?),
            ("lemma2", l2, lemma2_target(|s, _| s, interval, &dist)?),
        ] {
            let (m, se) = mean_se(&xs);
            out.push(Check { name, value: m, reference: target, tolerance: 4.0 * se, pass: (m - target).abs() <= 4.0 * se });
        }

        let model = PartialReuseModel::new(&p)?;
        let mut worst: f64 = 0.0;
        let mut reference = 0.0;
        for c in [1.0, 2.0, 3.0] {
            let full = mc_ebn0(c, &dist, &p)?.ebn0_linear;
            let part = model.ebn0(c, p.radius())?.ebn0_linear;
            worst = worst.max((part / full - 1.0).abs());
            reference = full;
        }
        out.push(Check { name: "full-reuse-consistency", value: worst, reference, tolerance: 1e-6, pass: worst <= 1e-6 });
    }

    let (k, rho) = (10, 1.0);
    let cfg = PfsSimConfig {
        n_slots: 20_000,
        trials: 10,
        seed: s.seed,
        ..PfsSimConfig::new(k, rho, SelectionRule::AsymptoticMaxFading)
    };
    let sim = simulate_pfs_sweep(&cfg, &[rho], &p)?.remove(0);
    let lb = lower_bound(rho, k, &p)?;
    let ub = upper_bound(rho, k, &p, 200_000, s.seed)?;
    let slack = 3.0 * (sim.std_error + ub.std_error);
    let pass = lb <= sim.c_estimate + 3.0 * sim.std_error && sim.c_estimate <= ub.mean + slack;
    out.push(Check { name: "pfs-sandwich", value: sim.c_estimate, reference: lb, tolerance: ub.mean, pass });
    Ok(out)
}

fn validate_rows(s: &Settings) -> Result<(Rows, usize), CliError> {
    let checks = validate_checks(s)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    let rows = checks
        .into_iter()
        .map(|c| {
            vec![
                Cell::Text(c.name.into()),
                Cell::Text(format!("{:.10e}", c.value)),
                Cell::Text(format!("{:.10e}", c.reference)),
                Cell::Text(format!("{:.3e}", c.tolerance)),
                status(if c.pass { "pass" } else { "fail" }),
            ]
        })
        .collect();
    Ok((rows, failed))
}

/// Evaluates a resolved request. `Err(Validation)` is returned only after the
/// report has been produced, alongside it.
pub fn execute(s: &Settings) -> Result<(Table, usize), CliError> {
    let mut meta = metadata(s);
    let mut failed = 0;
    let (columns, rows): (Vec<&'static str>, Rows) = match s.command {
        Command::HfCurve => (vec!["c", "sc_ebn0_db", "mc_ebn0_db", "beta", "regime", "status"], hf_curve(s)?),
        Command::HfLimit => (vec!["M", "c0"], hf_limit(s)?),
        Command::Beta => (vec!["c", "beta", "beta_lower", "beta_upper", "status"], beta_rows(s)?),
        Command::Simplified => {
            (vec!["c", "sc_ebn0_db", "simplified_ebn0_db", "regime", "status"], simplified_rows(s)?)
        }
        Command::PartialSweep => {
            (vec!["c", "r0", "ebn0_db", "i0", "i1", "gamma0", "gamma1", "status"], partial_sweep(s)?)
        }
        Command::PartialOpt => (
            vec!["c", "r0_opt", "ebn0_db", "full_reuse_db", "reuse2_db", "gain_db", "status"],
            partial_opt(s)?,
        ),
        Command::PfsSim => {
            (vec!["rho_db", "c", "std_error", "ebn0_db", "c_no_interference", "slots_used", "status"], pfs_sim(s)?)
        }
        Command::PfsBounds => {
            let (rows, (limit, se)) = pfs_bounds(s)?;
            meta.push(("capacity_limit".into(), format!("{limit:.6}")));
            meta.push(("capacity_limit_se".into(), format!("{se:.6}")));
            (vec!["rho_db", "lower", "upper", "upper_se", "status"], rows)
        }
        Command::Validate => {
            let (rows, f) = validate_rows(s)?;
            failed = f;
            (vec!["check", "value", "reference", "tolerance", "status"], rows)
        }
    };
    Ok((Table { meta, columns, rows }, failed))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::resolve(cli.command, cli.flags)?;
    let (table, failed) = execute(&settings)?;
    let text = table.render(settings.format);
    match &settings.out {
        Some(path) => std::fs::write(path, text).map_err(CliError::Io)?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(CliError::Io)?;
        }
    }
    if failed > 0 {
        return Err(CliError::Validation(failed));
    }
    Ok(())
}

/// Entry point shared by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = Grid::parse("c", &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(g.values(Scale::Linear).unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(Grid::parse("c", &[2.8, 2.8, 1.0]).unwrap().values(Scale::Log).unwrap(), vec![2.8]);
        assert!(Grid::parse("c", &[1.0, 2.0, 1.0]).is_err());
        assert!(Grid::parse("c", &[2.0, 1.0, 4.0]).is_err());
        assert!(Grid::parse("c", &[1.0, 2.0, 2.5]).is_err());
        assert!(Grid::parse("c", &[-1.0, 2.0, 3.0]).unwrap().values(Scale::Log).is_err());
        let log = Grid::parse("c", &[0.1, 10.0, 3.0]).unwrap().values(Scale::Log).unwrap();
        assert!((log[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn config_layering() {
        let file = parse_config("alpha = 3 # exponent\n\nc = 0.5 1 2\nrule = literal\n").unwrap();
        assert_eq!(file.alpha, Some(3.0));
        assert_eq!(file.c, Some(vec![0.5, 1.0, 2.0]));
        let flags = Flags { alpha: Some(2.5), ..Flags::default() }.or(file);
        assert_eq!(flags.alpha, Some(2.5));
        assert_eq!(flags.rule, Some(Rule::Literal));
        assert!(parse_config("config = other.cfg").is_err());
        assert!(parse_config("M = ten").is_err());
    }

    #[test]
    fn cell_formatting() {
        assert_eq!(Cell::Db(-5.02431).text(), "-5.0243");
        assert_eq!(Cell::Fine(1.1).text(), "1.100000");
        assert_eq!(Cell::Missing.text(), "");
        assert_eq!(Cell::Db(-5.02431).json(), serde_json::json!(-5.0243));
        assert_eq!(Cell::Fine(f64::INFINITY).json(), Value::Null);
    }

    #[test]
    fn error_classes() {
        assert_eq!(CliError::from(Error::Domain("x".into())).exit_code(), 1);
        assert_eq!(CliError::from(Error::IterationLimit(3)).exit_code(), 2);
        assert_eq!(CliError::Validation(1).exit_code(), 3);
    }
}
