//! Command-line front end.

use std::io::Write;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{casson_walker, compare_convergence, write_csv};
use crate::asympt::{full_expansion, vanish_scan, EvalMode};
use crate::error::{Error, Result};
use crate::exact::{tau_mode, HMode};
use crate::moduli::{cs_spectrum, index_sets, rep_exists, FlatFamilyLabel, LabelKind};
use crate::seifert::{parse_any, SeifertData};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

pub const MIN_PRECISION: u32 = 15;
pub const MAX_PRECISION: u32 = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Pretty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum EvalModeArg {
    #[default]
    ExactPhase,
    Series,
}

impl From<EvalModeArg> for EvalMode {
    fn from(m: EvalModeArg) -> Self {
        match m {
            EvalModeArg::ExactPhase => EvalMode::ExactPhase,
            EvalModeArg::Series => EvalMode::Series,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum HModeArg {
    Direct,
    #[default]
    Factored,
}

/// Inclusive level range `A..B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelRange {
    pub lo: i64,
    pub hi: i64,
}

impl LevelRange {
    pub fn levels(&self) -> Vec<i64> {
        (self.lo..=self.hi).collect()
    }
}

impl FromStr for LevelRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once("..=")
            .or_else(|| s.split_once(".."))
            .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
        let lo: i64 = a.trim().parse().map_err(|e| format!("bad lower level {a:?}: {e}"))?;
        let hi: i64 = b.trim().parse().map_err(|e| format!("bad upper level {b:?}: {e}"))?;
        if lo < 2 {
            return Err(format!("levels start at 2, got {lo}"));
        }
        if hi < lo {
            return Err(format!("empty range {lo}..{hi}"));
        }
        Ok(LevelRange { lo, hi })
    }
}

#[derive(Debug, Parser)]
#[command(name = "seifert-wrt", version, about = "WRT invariants of Seifert fibered 3-manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Levels, inclusive.
    #[arg(long = "r", global = true, default_value = "3..20", value_name = "A..B")]
    pub r: LevelRange,
    /// Stationary-phase depth.
    #[arg(long = "N", global = true, default_value_t = 2, value_name = "k")]
    pub depth: u32,
    /// Significant digits in text output.
    #[arg(long, global = true, default_value_t = MIN_PRECISION, value_name = "d")]
    pub precision: u32,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Pretty)]
    pub output: OutputFormat,
    #[arg(long = "eval-mode", global = true, value_enum, default_value_t = EvalModeArg::ExactPhase)]
    pub eval_mode: EvalModeArg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// tau_r over the level range.
    Invariant {
        manifold: String,
        #[arg(long = "h-mode", value_enum, default_value_t = HModeArg::Factored)]
        h_mode: HModeArg,
    },
    /// Full asymptotic expansion.
    Expand { manifold: String },
    /// Residuals of the expansion against exact values.
    Compare { manifold: String },
    /// Chern-Simons spectrum.
    Cs { manifold: String },
    /// Index sets with representation existence.
    Moduli { manifold: String },
    /// Casson-Walker invariant and the trivial-branch check.
    Casson { manifold: String },
    /// Z1 magnitudes at non-realizable I2b points.
    VanishScan { manifold: String },
}

impl Command {
    fn manifold(&self) -> &str {
        match self {
            Command::Invariant { manifold, .. }
            | Command::Expand { manifold }
            | Command::Compare { manifold }
            | Command::Cs { manifold }
            | Command::Moduli { manifold }
            | Command::Casson { manifold }
            | Command::VanishScan { manifold } => manifold,
        }
    }
}

/// Resolved run settings.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub precision_digits: u32,
    pub depth: i64,
    pub r_range: LevelRange,
    pub output: OutputFormat,
    pub eval_mode: EvalMode,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&cli.precision) {
            return Err(Error::Unsupported(format!(
                "precision {} outside {MIN_PRECISION}..={MAX_PRECISION} digits",
                cli.precision
            )));
        }
        Ok(RunConfig {
            precision_digits: cli.precision,
            depth: cli.depth as i64,
            r_range: cli.r,
            output: cli.output,
            eval_mode: cli.eval_mode.into(),
        })
    }
}

/// Rounds to `digits` significant digits relative to `scale`, shortest form.
pub fn fmt_num(x: f64, scale: f64, digits: u32) -> String {
    let tiny = scale.abs().max(f64::MIN_POSITIVE) * 10f64.powi(-(digits as i32));
    if x.abs() <= tiny || x == 0.0 {
        return "0.0".into();
    }
    let digits = digits.min(17);
    let rounded: f64 = format!("{:.*e}", digits as usize - 1, x).parse().unwrap_or(x);
    format!("{rounded:?}")
}

fn fmt_c(re: f64, im: f64, digits: u32) -> (String, String) {
    let s = re.hypot(im);
    (fmt_num(re, s, digits), fmt_num(im, s, digits))
}

fn json<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Error::Domain(format!("json output: {e}")))?;
    writeln!(out, "{s}").map_err(io_err)
}

fn io_err(e: std::io::Error) -> Error {
    Error::Domain(format!("output: {e}"))
}

fn csv_rows(out: &mut dyn Write, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Domain(format!("csv output: {e}"));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.flush().map_err(io_err)
}

#[derive(Serialize)]
struct LevelValue {
    r: i64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct ModuliEntry {
    label: String,
    q: String,
    rep_exists: Option<bool>,
}

#[derive(Serialize)]
struct ModuliReport {
    i1: Vec<ModuliEntry>,
    i2a: Vec<ModuliEntry>,
    i2b: Vec<ModuliEntry>,
}

fn moduli_entries(x: &SeifertData, labels: &[FlatFamilyLabel]) -> Vec<ModuliEntry> {
    labels
        .iter()
        .map(|l| ModuliEntry {
            label: l.to_string(),
            q: l.q.to_string(),
            rep_exists: match l.kind {
                LabelKind::I1 { .. } => None,
                LabelKind::I2 { .. } => Some(rep_exists(x, &l.kind)),
            },
        })
        .collect()
}

/// Runs one parsed command; returns the exit status.
pub fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let res = RunConfig::from_cli(cli)
        .and_then(|cfg| parse_any(cli.command.manifold()).map(|x| (cfg, x)))
        .and_then(|(cfg, x)| execute(&cli.command, &cfg, &x, out));
    match res {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

/// Parses `args` (including the program name) and dispatches.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            code
        }
    }
}

/// `Ok(false)` marks a verification failure.
fn execute(cmd: &Command, cfg: &RunConfig, x: &SeifertData, out: &mut dyn Write) -> Result<bool> {
    let d = cfg.precision_digits;
    match cmd {
        Command::Invariant { h_mode, .. } => {
            let mode = match h_mode {
                HModeArg::Direct => HMode::Direct,
                HModeArg::Factored => HMode::Factored,
            };
            let vals: Vec<LevelValue> = cfg
                .r_range
                .levels()
                .into_iter()
                .map(|r| tau_mode(x, r, mode).map(|v| LevelValue { r, re: v.re, im: v.im }))
                .collect::<Result<_>>()?;
            match cfg.output {
                OutputFormat::Json => json(out, &vals)?,
                OutputFormat::Csv | OutputFormat::Pretty => {
                    let rows = vals
                        .iter()
                        .map(|v| {
                            let (a, b) = fmt_c(v.re, v.im, d);
                            vec![v.r.to_string(), a, b]
                        })
                        .collect();
                    if cfg.output == OutputFormat::Csv {
                        csv_rows(out, &["r", "re", "im"], rows)?;
                    } else {
                        for r in rows {
                            writeln!(out, "{}", r.join(",")).map_err(io_err)?;
                        }
                    }
                }
            }
            Ok(true)
        }
        Command::Expand { .. } => {
            let exp = full_expansion(x, cfg.depth)?;
            let js = exp.to_json();
            match cfg.output {
                OutputFormat::Json => json(out, &js)?,
                OutputFormat::Csv => {
                    let mut rows = Vec::new();
                    for b in &js.branches {
                        for t in &b.terms {
                            let (a, c) = fmt_c(t.re, t.im, d);
                            rows.push(vec![b.q.clone(), t.exponent.clone(), a, c]);
                        }
                    }
                    csv_rows(out, &["q", "exponent", "re", "im"], rows)?;
                }
                OutputFormat::Pretty => {
                    let p = &js.prefactor;
                    let (a, b) = fmt_c(p.b_re, p.b_im, d);
                    let (sign, b) = match b.strip_prefix('-') {
                        Some(m) => ('-', m.to_string()),
                        None => ('+', b),
                    };
                    writeln!(
                        out,
                        "{x}\nprefactor: ({a} {sign} {b} i) r^({}) exp(i {} / r)",
                        p.power,
                        fmt_num(p.phase_c, p.phase_c, d)
                    )
                    .map_err(io_err)?;
                    if let Some(r0) = js.exact_from {
                        writeln!(out, "identity for r >= {r0}").map_err(io_err)?;
                    }
                    for br in &js.branches {
                        writeln!(out, "q = {}", br.q).map_err(io_err)?;
                        for t in &br.terms {
                            let (a, b) = fmt_c(t.re, t.im, d);
                            writeln!(out, "  r^({}): {a} {b}", t.exponent).map_err(io_err)?;
                        }
                    }
                    for pl in &js.polar {
                        writeln!(out, "polar q = {} (Z level)", pl.q).map_err(io_err)?;
                        for t in &pl.terms {
                            let (a, b) = fmt_c(t.re, t.im, d);
                            writeln!(out, "  r^{}: {a} {b}", t.exponent).map_err(io_err)?;
                        }
                    }
                }
            }
            Ok(true)
        }
        Command::Compare { .. } => {
            let rep = compare_convergence(x, cfg.depth, &cfg.r_range.levels(), cfg.eval_mode)?;
            match cfg.output {
                OutputFormat::Json => json(out, &rep)?,
                OutputFormat::Csv => write_csv(&rep, &mut *out)?,
                OutputFormat::Pretty => {
                    let max = rep.residuals.iter().cloned().fold(0.0, f64::max);
                    let f = |o: Option<f64>| o.map_or("inf".to_string(), |v| format!("{v:.4}"));
                    writeln!(
                        out,
                        "{}  N={}  r={}..{}\nmax residual {:.3e}\nfitted order {}  expected {}\n{}",
                        rep.manifold,
                        rep.depth,
                        cfg.r_range.lo,
                        cfg.r_range.hi,
                        max,
                        f(rep.fitted_order),
                        f(rep.expected_order),
                        if rep.passed { "PASS" } else { "FAIL" }
                    )
                    .map_err(io_err)?;
                }
            }
            Ok(rep.passed)
        }
        Command::Cs { .. } => {
            let spec = cs_spectrum(x);
            match cfg.output {
                OutputFormat::Json => json(out, &spec)?,
                _ => {
                    let rows = spec
                        .iter()
                        .map(|e| {
                            vec![e.label.clone(), e.q.to_string(), e.cs.to_string(), e.rep_exists.to_string()]
                        })
                        .collect();
                    if cfg.output == OutputFormat::Csv {
                        csv_rows(out, &["label", "q", "cs", "rep_exists"], rows)?;
                    } else {
                        for r in rows {
                            writeln!(out, "{:<32} q={:<10} cs={:<10} rep={}", r[0], r[1], r[2], r[3])
                                .map_err(io_err)?;
                        }
                    }
                }
            }
            Ok(true)
        }
        Command::Moduli { .. } => {
            let sets = index_sets(x);
            let rep = ModuliReport {
                i1: moduli_entries(x, &sets.i1),
                i2a: moduli_entries(x, &sets.i2a),
                i2b: moduli_entries(x, &sets.i2b),
            };
            let groups = [("I1", &rep.i1), ("I2a", &rep.i2a), ("I2b", &rep.i2b)];
            match cfg.output {
                OutputFormat::Json => json(out, &rep)?,
                OutputFormat::Csv => {
                    let mut rows = Vec::new();
                    for (name, g) in groups {
                        for e in g {
                            let re = e.rep_exists.map_or(String::new(), |b| b.to_string());
                            rows.push(vec![name.to_string(), e.label.clone(), e.q.clone(), re]);
                        }
                    }
                    csv_rows(out, &["set", "label", "q", "rep_exists"], rows)?;
                }
                OutputFormat::Pretty => {
                    for (name, g) in groups {
                        writeln!(out, "{name}: {} points", g.len()).map_err(io_err)?;
                        for e in g {
                            let re = e.rep_exists.map_or(String::new(), |b| format!(" rep={b}"));
                            writeln!(out, "  {:<32} q={}{re}", e.label, e.q).map_err(io_err)?;
                        }
                    }
                }
            }
            Ok(true)
        }
        Command::Casson { .. } => {
            let rep = casson_walker(x)?;
            match cfg.output {
                OutputFormat::Json => json(out, &rep)?,
                OutputFormat::Csv => {
                    let (a, b) = fmt_c(rep.ratio_re, rep.ratio_im, d);
                    csv_rows(
                        out,
                        &["lambda", "ratio_re", "ratio_im", "expected_im", "error", "passed"],
                        vec![vec![
                            rep.lambda.clone(),
                            a,
                            b,
                            fmt_num(rep.expected_im, rep.expected_im, d),
                            format!("{:e}", rep.error),
                            rep.passed.to_string(),
                        ]],
                    )?;
                }
                OutputFormat::Pretty => {
                    let (a, b) = fmt_c(rep.ratio_re, rep.ratio_im, d);
                    writeln!(
                        out,
                        "{}\nlambda_CW = {}\nc1/c0 = {a} + {b} i\n6 pi i lambda = {} i\nerror {:.3e}\n{}",
                        rep.manifold,
                        rep.lambda,
                        fmt_num(rep.expected_im, rep.expected_im, d),
                        rep.error,
                        if rep.passed { "PASS" } else { "FAIL" }
                    )
                    .map_err(io_err)?;
                }
            }
            Ok(rep.passed)
        }
        Command::VanishScan { .. } => {
            let scan = vanish_scan(x)?;
            match cfg.output {
                OutputFormat::Json => json(out, &scan)?,
                _ => {
                    let rows = scan
                        .iter()
                        .map(|e| {
                            vec![
                                e.label.clone(),
                                e.q.to_string(),
                                format!("{:e}", e.max_abs_z1),
                                format!("{:e}", e.max_abs_z0),
                            ]
                        })
                        .collect();
                    if cfg.output == OutputFormat::Csv {
                        csv_rows(out, &["label", "q", "max_abs_z1", "max_abs_z0"], rows)?;
                    } else {
                        for r in rows {
                            writeln!(out, "{:<32} q={:<10} |Z1|={:<12} |Z0|={}", r[0], r[1], r[2], r[3])
                                .map_err(io_err)?;
                        }
                    }
                }
            }
            Ok(true)
        }
    }
}
