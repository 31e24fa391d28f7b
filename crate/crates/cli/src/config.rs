//! Run configuration: parsed from flags or a `key=value` text file, with a
//! canonical text form that parses back to the same value.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use liecid::{Exponent, Level};

use crate::CliError;

/// Subcommand being run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Kernel,
    Classify,
    Fit,
    Operator,
    Selfcheck,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Spectrum,
        Command::Kernel,
        Command::Classify,
        Command::Fit,
        Command::Operator,
        Command::Selfcheck,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Kernel => "kernel",
            Command::Classify => "classify",
            Command::Fit => "fit",
            Command::Operator => "operator",
            Command::Selfcheck => "selfcheck",
        }
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::invalid(format!("unknown command `{s}`")))
    }
}

/// `torus:d`, `su2`, `so3` or `generic` (with a spectrum file).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupChoice {
    Torus(usize),
    Su2,
    So3,
    Generic,
}

impl fmt::Display for GroupChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupChoice::Torus(d) => write!(f, "torus:{d}"),
            GroupChoice::Su2 => f.write_str("su2"),
            GroupChoice::So3 => f.write_str("so3"),
            GroupChoice::Generic => f.write_str("generic"),
        }
    }
}

impl FromStr for GroupChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "su2" => Ok(GroupChoice::Su2),
            "so3" => Ok(GroupChoice::So3),
            "generic" => Ok(GroupChoice::Generic),
            "torus" => Ok(GroupChoice::Torus(1)),
            _ => {
                let d = s
                    .strip_prefix("torus:")
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&d| d > 0)
                    .ok_or_else(|| {
                        CliError::invalid(format!("unknown group `{s}`; use torus:d, su2, so3 or generic"))
                    })?;
                Ok(GroupChoice::Torus(d))
            }
        }
    }
}

/// Times: a single value or `a:b:n` (linear) / `a:b:n:log`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeGrid {
    Single(f64),
    Range { a: f64, b: f64, n: usize, log: bool },
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        match *self {
            TimeGrid::Single(t) => vec![t],
            TimeGrid::Range { a, b, n, log: true } => liecid::asymptotics::log_grid(a, b, n),
            TimeGrid::Range { a, b, n, log: false } => (0..n)
                .map(|i| {
                    if n == 1 {
                        a
                    } else if i == n - 1 {
                        b
                    } else {
                        a + (b - a) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            TimeGrid::Single(t) => (t, t),
            TimeGrid::Range { a, b, .. } => (a, b),
        }
    }
}

impl fmt::Display for TimeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TimeGrid::Single(t) => write!(f, "{t}"),
            TimeGrid::Range { a, b, n, log } => {
                write!(f, "{a}:{b}:{n}")?;
                if log {
                    f.write_str(":log")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for TimeGrid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::invalid(format!("bad time grid `{s}`; use t or a:b:n[:log]"));
        let num = |x: &str| x.parse::<f64>().ok().filter(|v| v.is_finite() && *v >= 0.0);
        let parts: Vec<&str> = s.split(':').collect();
        let grid = match parts.as_slice() {
            [t] => TimeGrid::Single(num(t).ok_or_else(bad)?),
            [a, b, n] | [a, b, n, _] => {
                let log = match parts.get(3) {
                    None => false,
                    Some(&"log") => true,
                    Some(_) => return Err(bad()),
                };
                let (a, b) = (num(a).ok_or_else(bad)?, num(b).ok_or_else(bad)?);
                let n: usize = n.parse().ok().filter(|&n| n > 0).ok_or_else(bad)?;
                if b < a || (log && a <= 0.0) {
                    return Err(bad());
                }
                TimeGrid::Range { a, b, n, log }
            }
            _ => return Err(bad()),
        };
        Ok(grid)
    }
}

/// A class point given as comma-separated coordinates.
pub fn parse_point(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::invalid(format!("bad class point `{s}`")))
        })
        .collect()
}

fn fmt_point(p: &[f64]) -> String {
    p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

/// Operation of the `operator` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorOp {
    Semigroup,
    Generator,
    Resolvent,
    Sobolev,
    Bound,
}

impl OperatorOp {
    const ALL: [OperatorOp; 5] = [
        OperatorOp::Semigroup,
        OperatorOp::Generator,
        OperatorOp::Resolvent,
        OperatorOp::Sobolev,
        OperatorOp::Bound,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OperatorOp::Semigroup => "semigroup",
            OperatorOp::Generator => "generator",
            OperatorOp::Resolvent => "resolvent",
            OperatorOp::Sobolev => "sobolev",
            OperatorOp::Bound => "bound",
        }
    }
}

impl FromStr for OperatorOp {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        OperatorOp::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| CliError::invalid(format!("unknown operator `{s}`")))
    }
}

/// Every option a run can carry. Unset options take command defaults.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub group: Option<GroupChoice>,
    pub file: Option<PathBuf>,
    pub exponent: Option<Exponent>,
    pub t: Option<TimeGrid>,
    pub tail: Option<f64>,
    pub max_terms: Option<u64>,
    pub out: Option<PathBuf>,
    pub json: bool,
    pub force_uncertified: bool,
    pub sequential: bool,
    pub count: Option<usize>,
    pub max_casimir: Option<f64>,
    pub grid: Option<usize>,
    pub at: Vec<Vec<f64>>,
    pub level: Option<Level>,
    pub only: Vec<String>,
    pub input: Option<PathBuf>,
    pub explore: bool,
    pub fourier: Option<PathBuf>,
    pub op: Option<OperatorOp>,
    pub lambda: Option<f64>,
    pub p: Option<u32>,
}

const KEYS: &[&str] = &[
    "command",
    "group",
    "file",
    "exponent",
    "t",
    "tail",
    "max_terms",
    "out",
    "json",
    "force_uncertified",
    "sequential",
    "count",
    "max_casimir",
    "grid",
    "at",
    "level",
    "only",
    "input",
    "explore",
    "fourier",
    "op",
    "lambda",
    "p",
];

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::invalid(format!("bad value `{v}` for `{key}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, CliError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(CliError::invalid(format!("`{key}` must be true or false"))),
    }
}

impl RunConfig {
    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    /// The value runs to the end of the line, so exponent specs may contain
    /// `=` themselves.
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut c = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::invalid(format!("config line {}: expected key=value", i + 1)))?;
            c.set(k.trim(), v.trim())
                .map_err(|e| CliError::invalid(format!("config line {}: {}", i + 1, e.message())))?;
        }
        Ok(c)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "command" => self.command = Some(v.parse()?),
            "group" => self.group = Some(v.parse()?),
            "file" => self.file = Some(PathBuf::from(v)),
            "exponent" => self.exponent = Some(v.parse().map_err(CliError::from)?),
            "t" => self.t = Some(v.parse()?),
            "tail" => self.tail = Some(parse_num(key, v)?),
            "max_terms" => self.max_terms = Some(parse_num(key, v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "json" => self.json = parse_bool(key, v)?,
            "force_uncertified" => self.force_uncertified = parse_bool(key, v)?,
            "sequential" => self.sequential = parse_bool(key, v)?,
            "count" => self.count = Some(parse_num(key, v)?),
            "max_casimir" => self.max_casimir = Some(parse_num(key, v)?),
            "grid" => self.grid = Some(parse_num(key, v)?),
            "at" => {
                self.at = v
                    .split(';')
                    .filter(|s| !s.is_empty())
                    .map(parse_point)
                    .collect::<Result<_, _>>()?
            }
            "level" => self.level = Some(v.parse().map_err(CliError::from)?),
            "only" => self.only = v.split(',').filter(|s| !s.is_empty()).map(String::from).collect(),
            "input" => self.input = Some(PathBuf::from(v)),
            "explore" => self.explore = parse_bool(key, v)?,
            "fourier" => self.fourier = Some(PathBuf::from(v)),
            "op" => self.op = Some(v.parse()?),
            "lambda" => self.lambda = Some(parse_num(key, v)?),
            "p" => self.p = Some(parse_num(key, v)?),
            _ => {
                return Err(CliError::invalid(format!(
                    "unknown key `{key}`; known keys: {}",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Canonical text: one `key=value` per set option, in a fixed order.
    pub fn to_text(&self) -> String {
        let mut lines = Vec::new();
        let mut put = |k: &str, v: String| lines.push(format!("{k}={v}"));
        if let Some(c) = self.command {
            put("command", c.name().into());
        }
        if let Some(g) = self.group {
            put("group", g.to_string());
        }
        if let Some(f) = &self.file {
            put("file", f.display().to_string());
        }
        if let Some(e) = &self.exponent {
            put("exponent", e.to_string());
        }
        if let Some(t) = &self.t {
            put("t", t.to_string());
        }
        if let Some(x) = self.tail {
            put("tail", x.to_string());
        }
        if let Some(x) = self.max_terms {
            put("max_terms", x.to_string());
        }
        if let Some(f) = &self.out {
            put("out", f.display().to_string());
        }
        if self.json {
            put("json", "true".into());
        }
        if self.force_uncertified {
            put("force_uncertified", "true".into());
        }
        if self.sequential {
            put("sequential", "true".into());
        }
        if let Some(x) = self.count {
            put("count", x.to_string());
        }
        if let Some(x) = self.max_casimir {
            put("max_casimir", x.to_string());
        }
        if let Some(x) = self.grid {
            put("grid", x.to_string());
        }
        if !self.at.is_empty() {
            put("at", self.at.iter().map(|p| fmt_point(p)).collect::<Vec<_>>().join(";"));
        }
        if let Some(l) = self.level {
            put("level", l.to_string());
        }
        if !self.only.is_empty() {
            put("only", self.only.join(","));
        }
        if let Some(f) = &self.input {
            put("input", f.display().to_string());
        }
        if self.explore {
            put("explore", "true".into());
        }
        if let Some(f) = &self.fourier {
            put("fourier", f.display().to_string());
        }
        if let Some(o) = self.op {
            put("op", o.name().into());
        }
        if let Some(x) = self.lambda {
            put("lambda", x.to_string());
        }
        if let Some(x) = self.p {
            put("p", x.to_string());
        }
        let mut s = lines.join("\n");
        s.push('\n');
        s
    }

    /// Options set in `over` replace those in `self`.
    pub fn overlay(mut self, over: RunConfig) -> RunConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(command, group, file, exponent, t, tail, max_terms, out, count, max_casimir, grid, level, input, fourier, op, lambda, p);
        self.json |= over.json;
        self.force_uncertified |= over.force_uncertified;
        self.sequential |= over.sequential;
        self.explore |= over.explore;
        if !over.at.is_empty() {
            self.at = over.at;
        }
        if !over.only.is_empty() {
            self.only = over.only;
        }
        self
    }
}
