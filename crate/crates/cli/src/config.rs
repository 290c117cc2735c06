//! Flags, `key=value` config files and the resolved run configuration.
//!
//! Precedence is flag, then file, then built-in default.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use zeeman_core::bohlin_map::DEFAULT_SEED;
use zeeman_core::fock_algebra::FockLabel;
use zeeman_core::grid::GridSpec;
use zeeman_core::perturbation::{DeltaSource, StateMode};
use zeeman_core::wigner::NegativityForm;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    PaperLiteral,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaArg {
    Paper,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormArg {
    Volume,
    Halved,
}

/// Four-dimensional negativity or the normalized slice at `(q2, p2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    #[value(name = "4d")]
    #[serde(rename = "4d")]
    Full,
    Slice,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Field strength(s), comma separated
    #[arg(long = "B", value_delimiter = ',')]
    pub b: Option<Vec<f64>>,
    /// Energy parameter(s); W = sqrt(2|E|)
    #[arg(long = "E", value_delimiter = ',', allow_negative_numbers = true)]
    pub e: Option<Vec<f64>>,
    /// Oscillator frequency, instead of E
    #[arg(long = "W")]
    pub w: Option<f64>,
    /// Coulomb coupling
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long)]
    pub n1: Option<u32>,
    #[arg(long)]
    pub n2: Option<u32>,
    /// All levels with n1 + n2 up to this value
    #[arg(long = "max-level")]
    pub max_level: Option<u32>,
    /// Perturbative order(s) of the state, 0 or 1
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<u32>>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    pub delta: Option<DeltaArg>,
    /// Nodes per axis
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub qmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub qmax: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub pmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub pmax: Option<f64>,
    #[arg(long = "slice-q2", allow_negative_numbers = true)]
    pub slice_q2: Option<f64>,
    #[arg(long = "slice-p2", allow_negative_numbers = true)]
    pub slice_p2: Option<f64>,
    /// Absolute tolerance for adaptive quadrature
    #[arg(long)]
    pub tol: Option<f64>,
    /// Fock cutoff per mode
    #[arg(long)]
    pub cutoff: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (directory for sweep); stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Also write a grayscale PGM next to each slice
    #[arg(long)]
    pub heatmap: bool,
    #[arg(long, value_enum)]
    pub form: Option<FormArg>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Worker threads for sweep
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Flat key=value config file
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("cannot parse {key}={v}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<Vec<T>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| parse(key, x)).collect()
}

fn parse_enum<T: ValueEnum>(key: &str, v: &str) -> CliResult<T> {
    T::from_str(v.trim(), true).map_err(|_| CliError::Config(format!("unknown value {key}={v}")))
}

impl Flags {
    /// Reads a config file into a `Flags` value.
    pub fn from_file(path: &Path) -> CliResult<Flags> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut f = Flags::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("{}:{}: expected key=value", path.display(), lineno + 1)))?;
            let key = key.trim().replace('_', "-");
            let v = value.trim();
            match key.as_str() {
                "B" | "b" => f.b = Some(parse_list("B", v)?),
                "E" | "e" => f.e = Some(parse_list("E", v)?),
                "W" | "w" => f.w = Some(parse("W", v)?),
                "k" => f.k = Some(parse("k", v)?),
                "n1" => f.n1 = Some(parse("n1", v)?),
                "n2" => f.n2 = Some(parse("n2", v)?),
                "max-level" => f.max_level = Some(parse("max-level", v)?),
                "order" => f.order = Some(parse_list("order", v)?),
                "mode" => f.mode = Some(parse_enum("mode", v)?),
                "delta" => f.delta = Some(parse_enum("delta", v)?),
                "grid" => f.grid = Some(parse("grid", v)?),
                "qmin" => f.qmin = Some(parse("qmin", v)?),
                "qmax" => f.qmax = Some(parse("qmax", v)?),
                "pmin" => f.pmin = Some(parse("pmin", v)?),
                "pmax" => f.pmax = Some(parse("pmax", v)?),
                "slice-q2" => f.slice_q2 = Some(parse("slice-q2", v)?),
                "slice-p2" => f.slice_p2 = Some(parse("slice-p2", v)?),
                "tol" => f.tol = Some(parse("tol", v)?),
                "cutoff" => f.cutoff = Some(parse("cutoff", v)?),
                "seed" => f.seed = Some(parse("seed", v)?),
                "out" => f.out = Some(PathBuf::from(v)),
                "format" => f.format = Some(parse_enum("format", v)?),
                "heatmap" => f.heatmap = parse("heatmap", v)?,
                "form" => f.form = Some(parse_enum("form", v)?),
                "variant" => f.variant = Some(parse_enum("variant", v)?),
                "jobs" => f.jobs = Some(parse("jobs", v)?),
                other => return Err(CliError::Config(format!("{}:{}: unknown key {other}", path.display(), lineno + 1))),
            }
        }
        Ok(f)
    }

    /// `self` where set, otherwise `base`.
    pub fn over(self, base: Flags) -> Flags {
        Flags {
            b: self.b.or(base.b),
            e: self.e.or(base.e),
            w: self.w.or(base.w),
            k: self.k.or(base.k),
            n1: self.n1.or(base.n1),
            n2: self.n2.or(base.n2),
            max_level: self.max_level.or(base.max_level),
            order: self.order.or(base.order),
            mode: self.mode.or(base.mode),
            delta: self.delta.or(base.delta),
            grid: self.grid.or(base.grid),
            qmin: self.qmin.or(base.qmin),
            qmax: self.qmax.or(base.qmax),
            pmin: self.pmin.or(base.pmin),
            pmax: self.pmax.or(base.pmax),
            slice_q2: self.slice_q2.or(base.slice_q2),
            slice_p2: self.slice_p2.or(base.slice_p2),
            tol: self.tol.or(base.tol),
            cutoff: self.cutoff.or(base.cutoff),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            heatmap: self.heatmap || base.heatmap,
            form: self.form.or(base.form),
            variant: self.variant.or(base.variant),
            jobs: self.jobs.or(base.jobs),
            config: self.config,
        }
    }
}

/// One oscillator frequency and the energy it came from, if any.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Frequency {
    pub e: Option<f64>,
    pub w: f64,
}

impl Frequency {
    pub fn tag(&self) -> String {
        match self.e {
            Some(e) => format!("E{e}"),
            None => format!("W{}", self.w),
        }
    }
}

/// Fully resolved and validated settings, echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(rename = "B")]
    pub b: Vec<f64>,
    #[serde(rename = "E")]
    pub e: Option<Vec<f64>>,
    #[serde(rename = "W")]
    pub w: Option<f64>,
    pub k: f64,
    pub n1: u32,
    pub n2: u32,
    pub max_level: Option<u32>,
    pub order: Vec<u32>,
    pub mode: ModeArg,
    pub delta: DeltaArg,
    pub grid: usize,
    pub qmin: f64,
    pub qmax: f64,
    pub pmin: f64,
    pub pmax: f64,
    pub slice_q2: f64,
    pub slice_p2: f64,
    pub tol: f64,
    pub cutoff: Option<u32>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: FormatArg,
    pub heatmap: bool,
    pub form: FormArg,
    pub variant: VariantArg,
    pub jobs: usize,
    pub energy_interpretation: String,
}

fn finite(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{name} must be finite")))
    }
}

impl RunConfig {
    pub fn resolve(command: &str, flags: Flags, defaults: Flags) -> CliResult<RunConfig> {
        let file = match &flags.config {
            Some(p) => Flags::from_file(p)?,
            None => Flags::default(),
        };
        let user = flags.over(file);
        if user.e.is_some() && user.w.is_some() {
            return Err(CliError::Config("give either E or W, not both".into()));
        }
        let mut defaults = defaults;
        if user.w.is_some() {
            defaults.e = None;
        }
        let f = user.over(defaults);
        let b = f.b.unwrap_or_else(|| vec![1.0]);
        if b.is_empty() {
            return Err(CliError::Config("B list is empty".into()));
        }
        for &v in &b {
            if !(finite("B", v)? >= 0.0) {
                return Err(CliError::Config(format!("B must be non-negative, got {v}")));
            }
        }
        let (e, w) = match (f.e, f.w) {
            (_, Some(w)) => {
                if !(finite("W", w)? > 0.0) {
                    return Err(CliError::Config(format!("W must be positive, got {w}")));
                }
                (None, Some(w))
            }
            (e, None) => {
                let e = e.unwrap_or_else(|| vec![1.0]);
                if e.is_empty() {
                    return Err(CliError::Config("E list is empty".into()));
                }
                for &v in &e {
                    if finite("E", v)? == 0.0 {
                        return Err(CliError::Config("E = 0 gives W = 0".into()));
                    }
                }
                (Some(e), None)
            }
        };
        let order = f.order.unwrap_or_else(|| vec![1]);
        if order.is_empty() || order.iter().any(|o| *o > 1) {
            return Err(CliError::Config("order must be 0 or 1".into()));
        }
        let grid = f.grid.unwrap_or(201);
        if grid < 3 {
            return Err(CliError::Config(format!("grid needs at least 3 nodes, got {grid}")));
        }
        let (qmin, qmax) = (finite("qmin", f.qmin.unwrap_or(-6.0))?, finite("qmax", f.qmax.unwrap_or(6.0))?);
        let (pmin, pmax) = (finite("pmin", f.pmin.unwrap_or(-6.0))?, finite("pmax", f.pmax.unwrap_or(6.0))?);
        if qmax <= qmin || pmax <= pmin {
            return Err(CliError::Config("grid ranges must be increasing".into()));
        }
        let tol = f.tol.unwrap_or(1e-11);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Config(format!("tol must be positive, got {tol}")));
        }
        let jobs = f.jobs.unwrap_or(4);
        if jobs == 0 {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
        let energy_interpretation = match &e {
            Some(_) => "W = sqrt(2|E|); positive E read as |E|".to_string(),
            None => "W given directly".to_string(),
        };
        Ok(RunConfig {
            command: command.to_string(),
            b,
            e,
            w,
            k: finite("k", f.k.unwrap_or(1.0))?,
            n1: f.n1.unwrap_or(0),
            n2: f.n2.unwrap_or(0),
            max_level: f.max_level,
            order,
            mode: f.mode.unwrap_or(ModeArg::Oracle),
            delta: f.delta.unwrap_or(DeltaArg::Oracle),
            grid,
            qmin,
            qmax,
            pmin,
            pmax,
            slice_q2: finite("slice-q2", f.slice_q2.unwrap_or(1.0))?,
            slice_p2: finite("slice-p2", f.slice_p2.unwrap_or(1.0))?,
            tol,
            cutoff: f.cutoff,
            seed: f.seed.unwrap_or(DEFAULT_SEED),
            out: f.out,
            format: f.format.unwrap_or(FormatArg::Csv),
            heatmap: f.heatmap,
            form: f.form.unwrap_or(FormArg::Volume),
            variant: f.variant.unwrap_or(VariantArg::Full),
            jobs,
            energy_interpretation,
        })
    }

    pub fn frequencies(&self) -> Vec<Frequency> {
        match (&self.e, self.w) {
            (_, Some(w)) => vec![Frequency { e: None, w }],
            (Some(es), None) => es
                .iter()
                .map(|&e| Frequency {
                    e: Some(e),
                    w: (2.0 * e.abs()).sqrt(),
                })
                .collect(),
            (None, None) => unreachable!("resolve always fills E or W"),
        }
    }

    /// `(n1, n2)` alone, or every level up to `max_level` ordered by `n1 + n2`.
    pub fn levels(&self) -> Vec<FockLabel> {
        match self.max_level {
            None => vec![FockLabel::new(self.n1, self.n2)],
            Some(m) => (0..=m)
                .flat_map(|t| (0..=t).rev().map(move |n1| FockLabel::new(n1, t - n1)))
                .collect(),
        }
    }

    pub fn single_b(&self) -> CliResult<f64> {
        match self.b.as_slice() {
            [b] => Ok(*b),
            _ => Err(CliError::Config(format!("{} takes a single B", self.command))),
        }
    }

    pub fn single_frequency(&self) -> CliResult<Frequency> {
        match self.frequencies().as_slice() {
            [f] => Ok(*f),
            _ => Err(CliError::Config(format!("{} takes a single E", self.command))),
        }
    }

    pub fn single_order(&self) -> CliResult<u32> {
        match self.order.as_slice() {
            [o] => Ok(*o),
            _ => Err(CliError::Config(format!("{} takes a single order", self.command))),
        }
    }

    pub fn state_mode(&self) -> StateMode {
        match self.mode {
            ModeArg::Oracle => StateMode::Oracle,
            ModeArg::PaperLiteral => StateMode::PaperLiteral,
        }
    }

    pub fn delta_source(&self) -> DeltaSource {
        match self.delta {
            DeltaArg::Oracle => DeltaSource::Oracle,
            DeltaArg::Paper => DeltaSource::Paper,
        }
    }

    pub fn negativity_form(&self) -> NegativityForm {
        match self.form {
            FormArg::Volume => NegativityForm::Volume,
            FormArg::Halved => NegativityForm::Halved,
        }
    }

    pub fn grid_spec(&self) -> GridSpec {
        GridSpec {
            q_min: self.qmin,
            q_max: self.qmax,
            p_min: self.pmin,
            p_max: self.pmax,
            nq: self.grid,
            np: self.grid,
            slice_q2: self.slice_q2,
            slice_p2: self.slice_p2,
        }
    }

    /// `config.<key>=<value>` pairs for CSV headers.
    pub fn echo(&self) -> Vec<(String, String)> {
        let value = serde_json::to_value(self).expect("config serializes");
        let mut out = Vec::new();
        if let serde_json::Value::Object(map) = value {
            for (k, v) in map {
                let text = match v {
                    serde_json::Value::Null => String::new(),
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Array(items) => items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"),
                    other => other.to_string(),
                };
                out.push((format!("config.{k}"), text));
            }
        }
        out
    }
}
