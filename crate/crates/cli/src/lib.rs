//! Command-line front end: spectrum dumps, kernel tables, regularity
//! verdicts, operator actions, power-law fits and the self-check suite.

pub mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use liecid::asymptotics::{self, Sample, DEFAULT_SAMPLES, DEFAULT_WINDOW};
use liecid::kernel::{class_grid, kernel_table, write_kernel_csv, KernelRow};
use liecid::measures::classify_regularity_with;
use liecid::operators::{apply_generator, apply_resolvent, apply_semigroup, generator_bound_check, sobolev_norm};
use liecid::output::sig17;
use liecid::spectrum::{index_label, load_spectrum};
use liecid::{
    CentralMeasure, ClassPoint, Cutoff, Error, Execution, Exponent, FourierFunction, GroupSpectrum, Level,
    Override, TruncationPolicy,
};

pub use config::{Command, GroupChoice, OperatorOp, RunConfig, TimeGrid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_REFUSAL: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

/// Error carrying its exit code and a machine-readable description.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub report: Value,
}

impl CliError {
    pub fn invalid(message: impl Into<String>) -> Self {
        let message = message.into();
        CliError {
            code: EXIT_INVALID,
            report: json!({ "error": "invalid_input", "message": message }),
        }
    }

    pub fn message(&self) -> String {
        self.report["message"].as_str().map_or_else(|| self.report.to_string(), String::from)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Refused { criterion, verdict } => CliError {
                code: EXIT_REFUSAL,
                report: json!({
                    "error": "refused",
                    "criterion": criterion,
                    "verdict": verdict,
                }),
            },
            Error::PointMass => CliError {
                code: EXIT_INVALID,
                report: json!({ "error": "point mass", "message": e.to_string() }),
            },
            other => CliError::invalid(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::invalid(format!("io error: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(name = "liecid", version, about = "Spectral densities of central Lévy-type measures on compact Lie groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Cmd {
    /// Enumerate irreps as CSV `index,dim,casimir`
    Spectrum,
    /// Tabulate k_t over a time grid and class points
    Kernel,
    /// Regularity verdicts as JSON
    Classify,
    /// Power-law fit of k_t(e) as JSON, with plot CSV at --out
    Fit,
    /// Apply a Fourier multiplier to JSON Fourier data
    Operator,
    /// Run the built-in check suite
    Selfcheck,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Spectrum => Command::Spectrum,
            Cmd::Kernel => Command::Kernel,
            Cmd::Classify => Command::Classify,
            Cmd::Fit => Command::Fit,
            Cmd::Operator => Command::Operator,
            Cmd::Selfcheck => Command::Selfcheck,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// torus:d, su2, so3 or generic
    #[arg(long, global = true)]
    pub group: Option<String>,
    /// Spectrum table for --group generic
    #[arg(long, global = true)]
    pub file: Option<PathBuf>,
    /// Exponent, e.g. "family=cauchy sigma=1"
    #[arg(long, global = true)]
    pub exponent: Option<String>,
    /// Time or grid a:b:n[:log]
    #[arg(long = "t", global = true)]
    pub t: Option<String>,
    /// Absolute tail budget
    #[arg(long, global = true)]
    pub tail: Option<f64>,
    #[arg(long, global = true)]
    pub max_terms: Option<u64>,
    /// Output file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub json: bool,
    /// Evaluate even when continuity of the density is not established
    #[arg(long, global = true)]
    pub force_uncertified: bool,
    /// Run all sums on one thread
    #[arg(long, global = true)]
    pub sequential: bool,
    /// key=value file; flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Number of irreps for `spectrum`
    #[arg(long, global = true)]
    pub count: Option<usize>,
    /// Casimir cutoff for `spectrum`
    #[arg(long, global = true)]
    pub max_casimir: Option<f64>,
    /// Equispaced class grid with this many points per coordinate
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Class point as comma-separated coordinates (repeatable)
    #[arg(long, global = true)]
    pub at: Vec<String>,
    /// L2, C0 or Ck
    #[arg(long, global = true)]
    pub level: Option<String>,
    /// Restrict `selfcheck` to the named checks (repeatable)
    #[arg(long, global = true)]
    pub only: Vec<String>,
    /// CSV of `t,value` samples for `fit`
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Uncertified fit against the t^(-dim/alpha) prediction
    #[arg(long, global = true)]
    pub explore: bool,
    /// JSON Fourier data for `operator`
    #[arg(long, global = true)]
    pub fourier: Option<PathBuf>,
    /// semigroup, generator, resolvent, sobolev or bound
    #[arg(long, global = true)]
    pub op: Option<String>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Sobolev index
    #[arg(long, global = true)]
    pub p: Option<u32>,
}

impl Opts {
    /// Resolves the config file (if any) with flags layered on top.
    pub fn to_config(&self, command: Command) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => RunConfig::from_text(&fs::read_to_string(path)?)?,
            None => RunConfig::default(),
        };
        let mut f = RunConfig {
            command: Some(command),
            file: self.file.clone(),
            tail: self.tail,
            max_terms: self.max_terms,
            out: self.out.clone(),
            json: self.json,
            force_uncertified: self.force_uncertified,
            sequential: self.sequential,
            count: self.count,
            max_casimir: self.max_casimir,
            grid: self.grid,
            only: self.only.clone(),
            input: self.input.clone(),
            explore: self.explore,
            fourier: self.fourier.clone(),
            lambda: self.lambda,
            p: self.p,
            ..RunConfig::default()
        };
        let pairs = [
            ("group", &self.group),
            ("exponent", &self.exponent),
            ("t", &self.t),
            ("level", &self.level),
            ("op", &self.op),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                f.set(k, v)?;
            }
        }
        if !self.at.is_empty() {
            f.set("at", &self.at.join(";"))?;
        }
        Ok(base.overlay(f))
    }
}

/// Validated inputs shared by the commands.
struct Resolved<'a> {
    cfg: &'a RunConfig,
    policy: TruncationPolicy,
}

impl<'a> Resolved<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self, CliError> {
        let exec = if cfg.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        };
        let policy = TruncationPolicy::new(
            cfg.tail.unwrap_or(TruncationPolicy::default().target_tail),
            cfg.max_terms.unwrap_or(TruncationPolicy::default().hard_max_terms),
        )?
        .with_execution(exec);
        Ok(Self { cfg, policy })
    }

    fn spectrum(&self) -> Result<Arc<GroupSpectrum>, CliError> {
        let group = match (self.cfg.group, &self.cfg.file) {
            (Some(g), _) => g,
            (None, Some(_)) => GroupChoice::Generic,
            (None, None) => return Err(CliError::invalid("--group is required")),
        };
        let spec = match group {
            GroupChoice::Torus(d) => GroupSpectrum::torus(d)?,
            GroupChoice::Su2 => GroupSpectrum::su2(),
            GroupChoice::So3 => GroupSpectrum::so3(),
            GroupChoice::Generic => {
                let path = self
                    .cfg
                    .file
                    .as_ref()
                    .ok_or_else(|| CliError::invalid("--group generic needs --file"))?;
                load_spectrum(fs::File::open(path)?, None)?
            }
        };
        Ok(Arc::new(spec))
    }

    fn exponent(&self) -> Result<Exponent, CliError> {
        self.cfg
            .exponent
            .clone()
            .ok_or_else(|| CliError::invalid("--exponent is required"))
    }

    fn times(&self) -> Result<Vec<f64>, CliError> {
        Ok(self
            .cfg
            .t
            .ok_or_else(|| CliError::invalid("--t is required"))?
            .times())
    }

    fn measure(&self) -> Result<CentralMeasure, CliError> {
        let times = self.times()?;
        Ok(CentralMeasure::new(self.spectrum()?, self.exponent()?, times[0])?)
    }

    fn override_mode(&self) -> Override {
        if self.cfg.force_uncertified {
            Override::ForceUncertified
        } else {
            Override::Checked
        }
    }
}

/// What a command produced: the main text and an optional side file.
#[derive(Debug, Default, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub files: Vec<(PathBuf, String)>,
    pub code: i32,
}

impl Output {
    fn text(s: String) -> Self {
        Output {
            stdout: s,
            ..Output::default()
        }
    }

    /// Main output to `--out` when given, else stdout.
    fn routed(cfg: &RunConfig, s: String) -> Self {
        match &cfg.out {
            Some(p) => Output {
                files: vec![(p.clone(), s)],
                ..Output::default()
            },
            None => Output::text(s),
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Output, CliError> {
    let command = cfg.command.ok_or_else(|| CliError::invalid("no command given"))?;
    let r = Resolved::new(cfg)?;
    match command {
        Command::Spectrum => cmd_spectrum(&r),
        Command::Kernel => cmd_kernel(&r),
        Command::Classify => cmd_classify(&r),
        Command::Fit => cmd_fit(&r),
        Command::Operator => cmd_operator(&r),
        Command::Selfcheck => cmd_selfcheck(&r),
    }
}

/// Writes side files and returns the exit code, printing errors as JSON on
/// stderr.
pub fn execute(cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = run(cfg).and_then(|out| {
        for (path, body) in &out.files {
            write_file(path, body)?;
        }
        stdout.write_all(out.stdout.as_bytes())?;
        Ok(out.code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.report);
            e.code
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::invalid(format!("cannot write {}: {e}", path.display())))
}

fn cmd_spectrum(r: &Resolved) -> Result<Output, CliError> {
    let spec = r.spectrum()?;
    let cutoff = match (r.cfg.count, r.cfg.max_casimir) {
        (Some(_), Some(_)) => return Err(CliError::invalid("give --count or --max-casimir, not both")),
        (Some(c), None) => Cutoff::MaxCount(c),
        (None, Some(k)) => Cutoff::MaxCasimir(k),
        (None, None) => Cutoff::MaxCount(10),
    };
    let e = spec.enumerate(cutoff)?;
    if r.cfg.json {
        let rows: Vec<Value> = e
            .irreps
            .iter()
            .map(|i| json!({"index": i.index, "dim": i.dim, "casimir": i.casimir}))
            .collect();
        return Ok(Output::routed(
            r.cfg,
            json!({"irreps": rows, "truncated": e.truncated}).to_string() + "\n",
        ));
    }
    let mut s = String::from("index,dim,casimir\n");
    for i in &e.irreps {
        s.push_str(&format!("{},{},{}\n", index_label(&i.index), i.dim, sig17(i.casimir)));
    }
    Ok(Output::routed(r.cfg, s))
}

fn class_points(r: &Resolved, spec: &GroupSpectrum) -> Result<Vec<ClassPoint>, CliError> {
    let mut points: Vec<ClassPoint> = r.cfg.at.iter().cloned().map(ClassPoint::new).collect();
    if let Some(n) = r.cfg.grid {
        points.extend(class_grid(spec, n)?);
    }
    if points.is_empty() {
        points.push(ClassPoint::identity(spec.kind()));
    }
    Ok(points)
}

fn cmd_kernel(r: &Resolved) -> Result<Output, CliError> {
    let m = r.measure()?;
    let times = r.times()?;
    let points = class_points(r, m.spectrum())?;
    let rows = kernel_table(&m, &times, &points, &r.policy, r.override_mode())?;
    if r.cfg.json {
        return Ok(Output::routed(r.cfg, kernel_json(&rows) + "\n"));
    }
    let mut buf = Vec::new();
    write_kernel_csv(&mut buf, &rows)?;
    Ok(Output::routed(r.cfg, String::from_utf8(buf).expect("csv is utf-8")))
}

fn kernel_json(rows: &[KernelRow]) -> String {
    let rows: Vec<Value> = rows
        .iter()
        .map(|row| {
            json!({
                "t": row.t,
                "point": row.point.coords,
                "value": row.value.value,
                "terms_used": row.value.terms_used,
                "tail_bound": row.value.tail_bound,
                "certified": row.value.certified,
            })
        })
        .collect();
    Value::Array(rows).to_string()
}

fn cmd_classify(r: &Resolved) -> Result<Output, CliError> {
    let m = r.measure()?;
    let times = r.times()?;
    let levels = match r.cfg.level {
        Some(l) => vec![l],
        None => vec![Level::L2, Level::C0],
    };
    if times.len() == 1 && levels.len() == 1 {
        let v = classify_regularity_with(&m, levels[0], &r.policy)?;
        return Ok(Output::routed(r.cfg, v.to_json() + "\n"));
    }
    let mut all = Vec::new();
    for &t in &times {
        let mt = m.at_time(t)?;
        for &l in &levels {
            let v = classify_regularity_with(&mt, l, &r.policy)?;
            let mut obj = serde_json::to_value(&v).expect("verdict serializes");
            obj["t"] = json!(t);
            all.push(obj);
        }
    }
    Ok(Output::routed(r.cfg, Value::Array(all).to_string() + "\n"))
}

fn read_samples(path: &Path) -> Result<Vec<Sample>, CliError> {
    let text = fs::read_to_string(path)?;
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',');
        let (t, v) = (parts.next(), parts.next());
        match (t.and_then(|x| x.trim().parse().ok()), v.and_then(|x| x.trim().parse().ok())) {
            (Some(t), Some(value)) => samples.push(Sample { t, value }),
            _ if i == 0 => continue,
            _ => return Err(CliError::invalid(format!("{}: bad sample on line {}", path.display(), i + 1))),
        }
    }
    Ok(samples)
}

fn cmd_fit(r: &Resolved) -> Result<Output, CliError> {
    let fit = if let Some(path) = &r.cfg.input {
        let samples = read_samples(path)?;
        let window = match r.cfg.t {
            Some(g) => g.bounds(),
            None => samples
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s.t), b.max(s.t))),
        };
        asymptotics::fit_power_law(&samples, window)?
    } else {
        let grid = r.cfg.t.unwrap_or(TimeGrid::Range {
            a: DEFAULT_WINDOW.0,
            b: DEFAULT_WINDOW.1,
            n: DEFAULT_SAMPLES,
            log: true,
        });
        let (times, window) = (grid.times(), grid.bounds());
        let m = CentralMeasure::new(r.spectrum()?, r.exponent()?, times[0])?;
        if r.cfg.explore {
            let report = asymptotics::conjecture_report(&m, window, times.len(), &r.policy)?;
            if let Some(p) = &r.cfg.out {
                let mut buf = Vec::new();
                report.fit.write_csv(&mut buf)?;
                write_file(p, &String::from_utf8(buf).expect("csv is utf-8"))?;
            }
            let body = serde_json::to_string(&report).expect("report serializes");
            return Ok(Output::text(body + "\n"));
        }
        let samples: Vec<Sample> = asymptotics::identity_samples(&m, &times, &r.policy, r.override_mode())?
            .into_iter()
            .map(|(s, _)| s)
            .collect();
        asymptotics::fit_power_law(&samples, window)?
    };
    let mut out = Output::text(fit.to_json() + "\n");
    if let Some(p) = &r.cfg.out {
        let mut buf = Vec::new();
        fit.write_csv(&mut buf)?;
        out.files.push((p.clone(), String::from_utf8(buf).expect("csv is utf-8")));
    }
    Ok(out)
}

fn cmd_operator(r: &Resolved) -> Result<Output, CliError> {
    let spec = r.spectrum()?;
    let path = r
        .cfg
        .fourier
        .as_ref()
        .ok_or_else(|| CliError::invalid("--fourier is required"))?;
    let f = FourierFunction::from_json(spec.clone(), &fs::read_to_string(path)?)?;
    let op = r.cfg.op.ok_or_else(|| CliError::invalid("--op is required"))?;
    let body = match op {
        OperatorOp::Semigroup => apply_semigroup(&r.measure()?, &f)?.to_json(),
        OperatorOp::Generator => apply_generator(&r.exponent()?, &f).to_json(),
        OperatorOp::Resolvent => {
            let lambda = r.cfg.lambda.ok_or_else(|| CliError::invalid("--lambda is required"))?;
            apply_resolvent(&r.exponent()?, lambda, &f)?.to_json()
        }
        OperatorOp::Sobolev => {
            serde_json::to_string(&sobolev_norm(&f, r.cfg.p.unwrap_or(0))).expect("norm serializes")
        }
        OperatorOp::Bound => {
            let b = generator_bound_check(&r.exponent()?, &f, r.cfg.p.unwrap_or(2))?;
            serde_json::to_string(&b).expect("bound serializes")
        }
    };
    Ok(Output::routed(r.cfg, body + "\n"))
}

fn cmd_selfcheck(r: &Resolved) -> Result<Output, CliError> {
    let report = liecid::selfcheck::run(&r.cfg.only)?;
    let body = if r.cfg.json {
        report.to_json() + "\n"
    } else {
        report.to_text()
    };
    let mut out = Output::routed(r.cfg, body);
    out.code = if report.passed { EXIT_OK } else { EXIT_FAILURE };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::from_text(text).unwrap()
    }

    #[test]
    fn spectrum_su2_five() {
        let out = run(&cfg("command=spectrum\ngroup=su2\ncount=5")).unwrap();
        let lines: Vec<&str> = out.stdout.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[5], format!("4,5,{}", sig17(24.0)));
    }

    #[test]
    fn refusal_and_point_mass_codes() {
        let refused = run(&cfg("command=kernel\ngroup=su2\nexponent=family=laplace beta=1\nt=1")).unwrap_err();
        assert_eq!(refused.code, EXIT_REFUSAL);
        assert_eq!(refused.report["error"], "refused");
        assert!(refused.report["criterion"].as_str().unwrap().contains("continuous"));
        let pm = run(&cfg("command=kernel\ngroup=su2\nexponent=family=cauchy sigma=1\nt=0")).unwrap_err();
        assert_eq!(pm.code, EXIT_INVALID);
        assert!(pm.report.to_string().contains("point mass"));
    }

    #[test]
    fn forced_laplace_is_marked_uncertified() {
        let out = run(&cfg(
            "command=kernel\ngroup=su2\nexponent=family=laplace beta=1\nt=1\nforce_uncertified=true\nat=1",
        ))
        .unwrap();
        assert!(out.stdout.lines().nth(1).unwrap().ends_with(",false"));
    }

    #[test]
    fn missing_inputs_are_invalid() {
        for text in ["command=kernel\ngroup=su2\nt=1", "command=kernel\nexponent=family=cauchy sigma=1\nt=1"] {
            assert_eq!(run(&cfg(text)).unwrap_err().code, EXIT_INVALID);
        }
        let bad_tail = run(&cfg("command=spectrum\ngroup=su2\ntail=-1")).unwrap_err();
        assert_eq!(bad_tail.code, EXIT_INVALID);
    }
}
