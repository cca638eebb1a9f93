//! Command-line front end: resolves flags and config files into a
//! [`RunConfig`], runs the requested command and renders its report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, FromArgMatches, Parser, ValueEnum};

use crate::algebra::{build_spec, AlgebraSpec, FamilyId};
use crate::denominator::{
    self, casimir_support_check, finite_identity, ratio_invariant, root_count_table, verify,
    CheckResult, DenomError, VerificationReport, VerifyOptions,
};
use crate::lattice::BasisSymbol;

pub const DEFAULT_DEPTH: u32 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CommandKind {
    /// Compare both sides of the affine denominator identity.
    Verify,
    /// Print the encoded root data and its validation.
    Inspect,
    /// Root counts per class and parity against the closed forms.
    Counts,
    /// The finite denominator identity of the finite part.
    Finite,
    /// Support of both sides on the Casimir shell.
    Casimir,
    /// The q-series ratio for the h∨ = 0 families.
    Ratio,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Parser, Debug, Default)]
#[command(
    name = "superdenom",
    version,
    about = "Exact checks of denominator identities for twisted affine Lie superalgebras"
)]
pub struct Cli {
    /// Command to run (may also come from the config file).
    #[arg(value_enum)]
    pub command: Option<CommandKind>,
    /// Family token, e.g. A_2k_2l-1_2.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub l: Option<u32>,
    /// Truncation depth: height below ρ̂ (default 6).
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Flat key = value file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub family: FamilyId,
    pub k: u32,
    pub l: u32,
    pub depth: u32,
    pub format: Format,
    pub output: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("unknown family '{0}'; valid tokens: {}", FamilyId::valid_tokens().join(", "))]
    UnknownFamily(String),
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("depth must be at least 1")]
    Depth,
    #[error("config {path}: {detail}")]
    Config { path: String, detail: String },
    #[error(transparent)]
    Spec(#[from] crate::algebra::SpecError),
    #[error("cannot write {path}: {detail}")]
    Output { path: String, detail: String },
}

fn family_help() -> String {
    let mut s = String::from("Family tokens:\n");
    for f in FamilyId::ALL {
        let _ = writeln!(s, "  {:<16}{}", f.token(), family_pattern(f));
    }
    s.push_str("\nExit codes: 0 all checks pass, 1 mismatch, 2 configuration or structural error.");
    s
}

fn family_pattern(f: FamilyId) -> &'static str {
    match f {
        FamilyId::A2k2lm1 => "A(2k,2l-1)^(2), k >= l >= 1",
        FamilyId::A2l2km1 => "A(2l,2k-1)^(2), k >= l+1",
        FamilyId::A2km12lm1 => "A(2k-1,2l-1)^(2), k >= l+1",
        FamilyId::A2lm12km1 => "A(2l-1,2k-1)^(2), k >= l",
        FamilyId::A2k2l4 => "A(2k,2l)^(4), k >= l+1",
        FamilyId::A2l2k4 => "A(2l,2k)^(4), k >= l",
        FamilyId::Dk1l => "D(k+1,l)^(2), k >= l+1",
        FamilyId::Dl1k => "D(l+1,k)^(2), k >= l",
        FamilyId::Cl1 => "C(l+1)^(2), l >= 1",
        FamilyId::A2km12km1 => "A(2k-1,2k-1)^(2), k >= 2",
        FamilyId::A2k2k4 => "A(2k,2k)^(4), k >= 1",
        FamilyId::Dk1k => "D(k+1,k)^(2), k >= 1",
        FamilyId::G3 => "G(3)^(2)",
    }
}

/// Parses a flat `key = value` config. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str, path: &str) -> Result<Cli, CliError> {
    let bad = |detail: String| CliError::Config {
        path: path.to_string(),
        detail,
    };
    let mut c = Cli::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("line {}: expected key = value", n + 1)))?;
        let (key, value) = (key.trim().trim_start_matches("--"), value.trim());
        let num = |v: &str| {
            v.parse::<u32>()
                .map_err(|e| bad(format!("line {}: {key}: {e}", n + 1)))
        };
        match key {
            "command" => {
                c.command = Some(
                    CommandKind::from_str(value, true)
                        .map_err(|e| bad(format!("line {}: {e}", n + 1)))?,
                )
            }
            "family" => c.family = Some(value.to_string()),
            "k" => c.k = Some(num(value)?),
            "l" => c.l = Some(num(value)?),
            "depth" => c.depth = Some(num(value)?),
            "format" => {
                c.format = Some(
                    Format::from_str(value, true)
                        .map_err(|e| bad(format!("line {}: {e}", n + 1)))?,
                )
            }
            "output" => c.output = Some(PathBuf::from(value)),
            _ => return Err(bad(format!("line {}: unknown key '{key}'", n + 1))),
        }
    }
    Ok(c)
}

impl RunConfig {
    /// Merges flags over the config file and validates the result.
    pub fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
        let file = match &cli.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Config {
                    path: p.display().to_string(),
                    detail: e.to_string(),
                })?;
                parse_config(&text, &p.display().to_string())?
            }
            None => Cli::default(),
        };
        let command = cli
            .command
            .or(file.command)
            .ok_or(CliError::Missing("command"))?;
        let token = cli
            .family
            .or(file.family)
            .ok_or(CliError::Missing("--family"))?;
        let family = FamilyId::from_token(&token).ok_or(CliError::UnknownFamily(token))?;
        let k = cli.k.or(file.k).unwrap_or(1);
        let l = cli
            .l
            .or(file.l)
            .unwrap_or(if family.is_diagonal() { k } else { 1 });
        let depth = cli.depth.or(file.depth).unwrap_or(DEFAULT_DEPTH);
        if depth == 0 {
            return Err(CliError::Depth);
        }
        let format = cli.format.or(file.format).unwrap_or_default();
        let output = cli.output.or(file.output);
        Ok(RunConfig {
            command,
            family,
            k,
            l,
            depth,
            format,
            output,
        })
    }

    pub fn spec(&self) -> Result<AlgebraSpec, CliError> {
        Ok(build_spec(self.family, self.k, self.l)?)
    }
}

/// A finished command: its report and the text rendering.
pub struct Outcome {
    pub report: VerificationReport,
    /// Extra text-mode body printed after the verdict (tables, data sheet).
    pub body: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self.report.status.as_str() {
            "match" => 0,
            "mismatch" => 1,
            _ => 2,
        }
    }
}

fn blank_report(spec: &AlgebraSpec, depth: u32) -> VerificationReport {
    VerificationReport {
        family: spec.family.token().to_string(),
        k: spec.k,
        l: spec.l,
        depth,
        q_depth: denominator::window(spec, depth)
            .map(|w| w.q_depth)
            .unwrap_or(0),
        anchor: spec.rho_hat.to_string(),
        status: "match".into(),
        lhs_terms: 0,
        rhs_terms: 0,
        mismatches: vec![],
        checks: BTreeMap::new(),
    }
}

fn settle(mut r: VerificationReport) -> VerificationReport {
    if r.status != "error" {
        let ok = r.mismatches.is_empty() && r.checks.values().all(|c| c.pass);
        r.status = if ok { "match" } else { "mismatch" }.into();
    }
    r
}

fn fail(mut r: VerificationReport, name: &str, e: &DenomError) -> VerificationReport {
    r.status = "error".into();
    r.checks
        .insert(name.to_string(), CheckResult::new(false, e.to_string()));
    r
}

/// W^# candidates for the finite identity: the default choice, and the other
/// even component when both have the same number of roots.
pub fn sharp_choices(spec: &AlgebraSpec) -> Vec<Vec<BasisSymbol>> {
    let first = spec.sharp_letters();
    let mut out = vec![first.clone()];
    if spec.family == FamilyId::G3 {
        return out;
    }
    let size = |letters: &[BasisSymbol]| {
        [&spec.delta_prime, &spec.delta_doubleprime]
            .into_iter()
            .find(|s| s.letters == letters)
            .map(|s| spec.subsystem_finite_roots(s).len())
    };
    for sub in [&spec.delta_prime, &spec.delta_doubleprime] {
        if sub.letters != first && size(&sub.letters) == size(&first) {
            out.push(sub.letters.clone());
        }
    }
    out
}

fn run_finite(spec: &AlgebraSpec, depth: u32) -> Outcome {
    let mut r = blank_report(spec, depth);
    let body = String::new();
    for (i, letters) in sharp_choices(spec).iter().enumerate() {
        let name = if i == 0 {
            "finite_identity".to_string()
        } else {
            format!("finite_identity_alt{i}")
        };
        match finite_identity(spec, depth, Some(letters)) {
            Ok(fi) => {
                let mm = denominator::compare(&fi.lhs, &fi.rhs);
                let ls: Vec<String> = fi.letters.iter().map(|s| s.to_string()).collect();
                let detail = format!(
                    "finite part {}, W^# on [{}] of order {}, {} terms at height <= {}",
                    spec.finite_type,
                    ls.join(" "),
                    fi.group_order,
                    fi.lhs.len(),
                    depth
                );
                r.checks
                    .insert(name, CheckResult::new(mm.is_empty(), detail));
                if i == 0 {
                    r.anchor = fi.anchor.to_string();
                    r.lhs_terms = fi.lhs.len();
                    r.rhs_terms = fi.rhs.len();
                }
                r.mismatches.extend(mm);
            }
            Err(e) => {
                return Outcome {
                    report: fail(r, &name, &e),
                    body,
                }
            }
        }
    }
    Outcome {
        report: settle(r),
        body,
    }
}

fn run_counts(spec: &AlgebraSpec, depth: u32) -> Outcome {
    let mut r = blank_report(spec, depth);
    let rows = root_count_table(spec);
    let mut body = format!("{:<22}{:>10}{:>10}\n", "count", "expected", "actual");
    for row in &rows {
        let e = row
            .expected
            .map(|e| e.to_string())
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            body,
            "{:<22}{:>10}{:>10}{}",
            row.label,
            e,
            row.actual,
            if row.ok() { "" } else { "  !" }
        );
    }
    r.checks
        .insert("root_counts".into(), denominator::root_count_report(spec));
    Outcome {
        report: settle(r),
        body,
    }
}

fn run_inspect(spec: &AlgebraSpec, depth: u32) -> Outcome {
    let mut r = blank_report(spec, depth);
    let v = spec.validate();
    let detail = if v.ok() {
        "all structural checks pass".to_string()
    } else {
        v.failures.join("; ")
    };
    r.checks
        .insert("validate".into(), CheckResult::new(v.ok(), detail));
    if !v.ok() {
        r.status = "error".into();
    }
    Outcome {
        report: settle(r),
        body: spec.data_sheet(),
    }
}

fn run_casimir(spec: &AlgebraSpec, depth: u32) -> Outcome {
    let r = blank_report(spec, depth);
    match casimir_support_check(spec, depth) {
        Ok(c) => {
            let mut r = r;
            r.checks.insert("casimir".into(), c);
            Outcome {
                report: settle(r),
                body: String::new(),
            }
        }
        Err(e) => Outcome {
            report: fail(r, "casimir", &e),
            body: String::new(),
        },
    }
}

fn run_ratio(spec: &AlgebraSpec, depth: u32) -> Outcome {
    let r = blank_report(spec, depth);
    match ratio_invariant(spec, depth) {
        Ok(rr) => {
            let mut r = r;
            let mut body = String::new();
            for e in &rr.escaping {
                let _ = writeln!(body, "escaping: {e}");
            }
            r.checks.insert("ratio".into(), rr.check);
            Outcome {
                report: settle(r),
                body,
            }
        }
        Err(e) => Outcome {
            report: fail(r, "ratio", &e),
            body: String::new(),
        },
    }
}

/// Runs the configured command.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = config.spec()?;
    let d = config.depth;
    Ok(match config.command {
        CommandKind::Verify => Outcome {
            report: verify(&spec, d, &VerifyOptions::default()),
            body: String::new(),
        },
        CommandKind::Inspect => run_inspect(&spec, d),
        CommandKind::Counts => run_counts(&spec, d),
        CommandKind::Finite => run_finite(&spec, d),
        CommandKind::Casimir => run_casimir(&spec, d),
        CommandKind::Ratio => run_ratio(&spec, d),
    })
}

pub fn render_json(r: &VerificationReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}

pub fn render_text(o: &Outcome, color: bool) -> String {
    let r = &o.report;
    let paint = |s: &str, code: &str| {
        if color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    };
    let verdict = match r.status.as_str() {
        "match" => paint("MATCH", "32"),
        "mismatch" => paint("MISMATCH", "31"),
        _ => paint("ERROR", "33"),
    };
    let mut s = format!(
        "{verdict} {} k={} l={} depth={} q_depth={} lhs_terms={} rhs_terms={} mismatches={}\n",
        r.family,
        r.k,
        r.l,
        r.depth,
        r.q_depth,
        r.lhs_terms,
        r.rhs_terms,
        r.mismatches.len()
    );
    if !r.mismatches.is_empty() {
        let w = r
            .mismatches
            .iter()
            .map(|m| m.weight.len())
            .max()
            .unwrap_or(6)
            .max(6);
        let _ = writeln!(s, "{:<w$}  {:>10}  {:>10}", "weight", "lhs", "rhs");
        for m in &r.mismatches {
            let _ = writeln!(s, "{:<w$}  {:>10}  {:>10}", m.weight, m.lhs, m.rhs);
        }
    }
    if !o.body.is_empty() {
        s.push_str(&o.body);
    }
    for (name, c) in &r.checks {
        let mark = if c.pass {
            paint("pass", "32")
        } else {
            paint("FAIL", "31")
        };
        let _ = writeln!(s, "  [{mark}] {name}: {}", c.detail);
    }
    s
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Output {
            path: p.display().to_string(),
            detail: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Full command-line entry point; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = match Cli::command()
        .after_help(family_help())
        .try_get_matches_from(args)
    {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    let config = match RunConfig::resolve(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let outcome = match run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let text = match config.format {
        Format::Json => render_json(&outcome.report),
        Format::Text => {
            let color = config.output.is_none()
                && std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty())
                && std::io::stdout().is_terminal();
            render_text(&outcome, color)
        }
    };
    if let Err(e) = write_out(config.output.as_deref(), &text) {
        eprintln!("error: {e}");
        return 2;
    }
    outcome.exit_code()
}
