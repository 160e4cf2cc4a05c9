//! Command-line front end. [`run`] returns the process exit status:
//! 0 PASS, 1 FAIL or known exception, 2 INCOMPLETE or aborted, 3 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{self, GenericRank};
use crate::certificate::{self, certify, CertifyOptions, Mode, RunConfig, Verdict};
use crate::contact::{contact_check, span_section_report, tangency_ideal, ContactVerdict};
use crate::error::{Error, Result};
use crate::exactlin::{PrimeField, RngState};
use crate::planner::{self, bundled_script, RootVerdict, Strategy};
use crate::segre::{sample_span, Format, Problem};
use crate::store::CertStore;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCOMPLETE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// Cubic rows reproduced by bundled scripts, `(a, script)`.
const CUBIC_SCRIPTS: &[(usize, &str)] = &[(8, "paper-a8"), (9, "paper-a9"), (10, "paper-a10")];

#[derive(Debug, Parser)]
#[command(name = "tensorid", version, about = "Identifiability certificates for tensors of given rank and format")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Prime modulus of the working field.
    #[arg(long, global = true, default_value_t = crate::exactlin::DEFAULT_PRIME)]
    prime: u32,
    #[arg(long, global = true, default_value_t = certificate::DEFAULT_SEED)]
    seed: u64,
    /// Random configurations tried before a first-order FAIL is reported.
    #[arg(long, global = true, default_value_t = crate::wdcheck::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, global = true, value_enum, default_value_t = Mode::FirstOrder)]
    mode: Mode,
    /// Gröbner work limit in term operations.
    #[arg(long, global = true, default_value_t = crate::contact::Budget::default().max_term_ops)]
    budget: u64,
    /// Certificate cache file (JSON array), created on first write.
    #[arg(long, global = true)]
    cache: Option<String>,
    /// Write the certificate or report as JSON to this path ('-' for stdout).
    #[arg(long, global = true)]
    emit: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certify that the general tensor of rank k has a unique decomposition.
    Certify {
        #[arg(required = true, num_args = 3..)]
        dims: Vec<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Aux counts p_1..p_n, or k followed by them.
        #[arg(long, num_args = 1..)]
        aux: Vec<usize>,
        /// Bundled script name or path to a plan script.
        #[arg(long)]
        script: Option<String>,
    },
    /// Recompute a results table.
    Table {
        #[arg(value_enum)]
        kind: TableKind,
        #[arg(long, default_value_t = 10)]
        max_a: usize,
        /// Re-run the evidence behind each entry.
        #[arg(long)]
        verify: bool,
    },
    /// Build (or load) a reduction plan and execute it.
    Plan {
        #[arg(num_args = 3..)]
        dims: Vec<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, num_args = 1..)]
        aux: Vec<usize>,
        #[arg(long, default_value_t = 2)]
        base: usize,
        #[arg(long)]
        script: Option<String>,
        /// Print the plan without executing it.
        #[arg(long)]
        dry_run: bool,
    },
    /// Closed-form bounds for a format.
    Bounds {
        #[arg(required = true, num_args = 3..)]
        dims: Vec<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Saturated tangency locus at random points, with the line report for spans in (2,2,2).
    Contact {
        #[arg(required = true, num_args = 3..)]
        dims: Vec<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, num_args = 1..)]
        aux: Vec<usize>,
        /// Also print the unsaturated tangency ideal, one generator per line.
        #[arg(long)]
        dump_ideal: bool,
    },
    /// Re-run a certificate with its recorded configuration and compare.
    Replay { certificate: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableKind {
    Cubic,
    Comparison,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_exit_code(&e)
        }
    }
}

pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Aborted(_) | Error::SpanFillsAmbient { .. } => EXIT_INCOMPLETE,
        _ => EXIT_USAGE,
    }
}

fn config(g: &GlobalOpts) -> RunConfig {
    RunConfig {
        prime: g.prime,
        seed: g.seed,
        trials: g.trials,
        mode: g.mode,
        budget: g.budget,
        cache: g.cache.clone(),
        output: g.emit.clone(),
        ..RunConfig::default()
    }
}

fn io(e: std::io::Error) -> Error {
    e.into()
}

/// `--aux` carries either `p_1..p_n` (with `--k`) or `k, p_1..p_n`.
fn problem_from(dims: Vec<usize>, k: Option<usize>, aux: Vec<usize>) -> Result<Problem> {
    let n = dims.len();
    match (k, aux.len()) {
        (Some(k), 0) => Problem::plain(dims, k),
        (Some(k), m) if m == n => Problem::new(dims, k, aux),
        (None, m) if m == n + 1 => Problem::new(dims, aux[0], aux[1..].to_vec()),
        (None, 0) => Err(Error::InvalidProblem("--k is required".into())),
        _ => Err(Error::InvalidProblem(format!(
            "--aux takes {n} values (with --k) or {} values (k first)",
            n + 1
        ))),
    }
}

fn load_script(spec: &str) -> Result<String> {
    match bundled_script(spec) {
        Some(text) => Ok(text.to_string()),
        None if Path::new(spec).exists() => fs::read_to_string(spec).map_err(io),
        None => {
            let names: Vec<&str> = planner::BUNDLED.iter().map(|(n, _)| *n).collect();
            Err(Error::InvalidProblem(format!(
                "no script file '{spec}' and no bundled script of that name (bundled: {})",
                names.join(", ")
            )))
        }
    }
}

fn emit(path: &Option<String>, json: &str, out: &mut dyn Write) -> Result<()> {
    match path.as_deref() {
        None => Ok(()),
        Some("-") => out.write_all(json.as_bytes()).map_err(io),
        Some(p) => fs::write(p, json).map_err(io),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let g = &cli.global;
    PrimeField::new(g.prime)?;
    match cli.command {
        Command::Certify { dims, k, aux, script } => {
            let problem = problem_from(dims, k, aux)?;
            let options = CertifyOptions {
                script: script.as_deref().map(load_script).transpose()?,
                compute_only: false,
            };
            let config = config(g);
            let mut store = g.cache.as_ref().map(CertStore::open).transpose()?;
            let cert = certify(&problem, &config, &options, store.as_mut())?;
            writeln!(out, "{} {} [{}]", cert.verdict.label(), cert.problem, basis_name(&cert)).map_err(io)?;
            writeln!(out, "  {}", cert.message).map_err(io)?;
            emit(&g.emit, &cert.to_json(), out)?;
            Ok(cert.verdict.exit_code())
        }
        Command::Table { kind, max_a, verify } => {
            if max_a < 2 {
                return Err(Error::InvalidProblem("--max-a must be at least 2".into()));
            }
            table(kind, max_a, verify, &config(g), out)
        }
        Command::Plan {
            dims,
            k,
            aux,
            base,
            script,
            dry_run,
        } => {
            let tree = match (&script, dims.is_empty()) {
                (Some(s), true) => planner::plan_script(&load_script(s)?)?,
                (Some(s), false) => planner::plan(&problem_from(dims, k, aux)?, &Strategy::Script(load_script(s)?))?,
                (None, false) => planner::plan(&problem_from(dims, k, aux)?, &Strategy::PowerSplit { base })?,
                (None, true) => return Err(Error::InvalidProblem("give dims and --k, or --script".into())),
            };
            write!(out, "{}", tree.to_script()).map_err(io)?;
            if dry_run {
                emit(&g.emit, &(serde_json::to_string_pretty(&tree)? + "\n"), out)?;
                return Ok(EXIT_PASS);
            }
            let cfg = config(g).exec_config();
            let exec = planner::execute(&tree, &cfg)?;
            for leaf in &exec.leaves {
                writeln!(out, "leaf {:<10} {} {:?}", leaf.path, leaf.problem, leaf.verdict).map_err(io)?;
            }
            for v in &exec.validation.violations {
                writeln!(out, "invalid {v}").map_err(io)?;
            }
            writeln!(out, "root {:?}", exec.verdict).map_err(io)?;
            emit(&g.emit, &(serde_json::to_string_pretty(&exec)? + "\n"), out)?;
            Ok(match exec.verdict {
                RootVerdict::Pass => EXIT_PASS,
                RootVerdict::Fail | RootVerdict::Invalid => EXIT_FAIL,
                RootVerdict::Incomplete => EXIT_INCOMPLETE,
            })
        }
        Command::Bounds { dims, k } => {
            let format = Format::new(dims)?;
            let report = bounds::bound_report(&format);
            writeln!(out, "format       {format}").map_err(io)?;
            writeln!(out, "ambient D    {}", format.ambient()).map_err(io)?;
            writeln!(out, "k_max        {}", report.k_max).map_err(io)?;
            writeln!(out, "kruskal_max  {}", report.kruskal_max).map_err(io)?;
            for (base, b) in &report.co_bounds {
                writeln!(out, "co_bound     {b} (base {base})").map_err(io)?;
            }
            match report.generic_rank {
                GenericRank::Known(r) => writeln!(out, "generic rank {r}"),
                GenericRank::Unknown => writeln!(out, "generic rank unknown (no closed form for this format)"),
            }
            .map_err(io)?;
            for e in &report.exceptions {
                writeln!(out, "exception    k = {} [{}] {}", e.k, e.row, e.note).map_err(io)?;
            }
            if let Some(k) = k {
                writeln!(out, "kruskal({k})   {}", bounds::kruskal_holds(&format, k as u64)).map_err(io)?;
            }
            emit(&g.emit, &(serde_json::to_string_pretty(&report)? + "\n"), out)?;
            Ok(EXIT_PASS)
        }
        Command::Contact {
            dims,
            k,
            aux,
            dump_ideal,
        } => contact(problem_from(dims, k, aux)?, dump_ideal, &config(g), out),
        Command::Replay { certificate } => {
            let text = fs::read_to_string(&certificate).map_err(io)?;
            let cert = certificate::Certificate::from_json(&text)?;
            let again = certificate::replay(&cert)?;
            let same = again.to_json() == cert.to_json();
            writeln!(
                out,
                "{} {} {}",
                if same { "REPRODUCED" } else { "MISMATCH" },
                again.verdict.label(),
                again.problem
            )
            .map_err(io)?;
            if !same {
                writeln!(out, "  recorded: {} [{}]", cert.verdict.label(), basis_name(&cert)).map_err(io)?;
                writeln!(out, "  replayed: {} [{}]", again.verdict.label(), basis_name(&again)).map_err(io)?;
            }
            emit(&g.emit, &again.to_json(), out)?;
            Ok(if same { again.verdict.exit_code() } else { EXIT_FAIL })
        }
    }
}

fn basis_name(cert: &certificate::Certificate) -> String {
    serde_json::to_value(cert.basis)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn contact(problem: Problem, dump_ideal: bool, config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let field = PrimeField::new(config.prime)?;
    let report = contact_check(&problem, field, &mut RngState::new(config.seed), config.budget())?;
    let locus = &report.locus;
    writeln!(out, "problem {problem}").map_err(io)?;
    writeln!(out, "span rank {} of ambient {}", report.span_rank, report.ambient).map_err(io)?;
    if locus.dim < 0 {
        writeln!(out, "saturated tangency ideal is the unit ideal").map_err(io)?;
    } else {
        writeln!(out, "saturated tangency locus: dim {}, degree {}", locus.dim, locus.degree).map_err(io)?;
    }
    // same seed, so this is the span the check above used
    let (span, _) = sample_span(&problem, field, &mut RngState::new(config.seed));
    if dump_ideal {
        write!(out, "{}", tangency_ideal(&span, Some(config.seed))?.dump()).map_err(io)?;
    }
    let section = if problem.n() == 3 && problem.format().dims().iter().filter(|&&a| a == 2).count() >= 2 {
        Some(span_section_report(&span, &mut RngState::new(config.seed).child(2), config.budget())?)
    } else {
        None
    };
    let locus_text = if locus.dim < 0 {
        "tangency locus empty".to_string()
    } else {
        format!("tangency locus dim {} degree {}", locus.dim, locus.degree)
    };
    match &section {
        Some(s) => {
            let lines = &s.lines;
            for (i, l) in lines.lines.iter().enumerate() {
                let fixed: Vec<String> = l.fixed.iter().filter(|v| !v.is_empty()).map(|v| format!("{v:?}")).collect();
                writeln!(out, "line {i}: free factor {}, fixed {}", l.free + 1, fixed.join(" x ")).map_err(io)?;
            }
            let pairs: Vec<String> = lines.incidences.iter().map(|(i, j)| format!("{i}-{j}")).collect();
            writeln!(out, "incidences {}", pairs.join(" ")).map_err(io)?;
            match &lines.cycle {
                Some(c) => writeln!(out, "lines meet exactly in the cyclic order {c:?}").map_err(io)?,
                None => writeln!(out, "lines do not form a single cycle").map_err(io)?,
            }
            writeln!(out, "{locus_text}; span∩X = {} lines", lines.reduced_degree()).map_err(io)?;
        }
        None => writeln!(out, "{locus_text}").map_err(io)?,
    }
    #[derive(serde::Serialize)]
    struct Out<'a> {
        contact: &'a crate::contact::ContactReport,
        section: &'a Option<crate::contact::SectionReport>,
    }
    let json = serde_json::to_string_pretty(&Out {
        contact: &report,
        section: &section,
    })? + "\n";
    emit(&config.output, &json, out)?;
    Ok(if report.verdict == ContactVerdict::Pass { EXIT_PASS } else { EXIT_FAIL })
}

/// One column of the cubic table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicEntry {
    pub a: usize,
    pub k: u64,
    /// Only a lower bound is known (`k(a) >= k`).
    pub lower_bound: bool,
    pub source: String,
}

/// `k(a)`: the largest certified `k` for `(a,a,a)`. Up to 7 this is the
/// largest `k <= k_max` with no known exception; 8 to 10 come from the
/// bundled plans; beyond that only the reduction lower bound is reported.
pub fn cubic_entry(a: usize) -> Result<CubicEntry> {
    let format = Format::new(vec![a; 3])?;
    if a <= 7 {
        let k = (1..=bounds::k_max(&format))
            .rev()
            .find(|&k| bounds::known_exceptions(a as u64, a as u64, a as u64, k).is_empty())
            .unwrap_or(0);
        return Ok(CubicEntry {
            a,
            k,
            lower_bound: false,
            source: "direct".into(),
        });
    }
    if let Some((_, name)) = CUBIC_SCRIPTS.iter().find(|(b, _)| *b == a) {
        let tree = planner::parse_script(bundled_script(name).expect("bundled"))?;
        return Ok(CubicEntry {
            a,
            k: tree.root_problem().k as u64,
            lower_bound: false,
            source: (*name).into(),
        });
    }
    let k = [bounds::co_bound(&format, 2), bounds::co_bound(&format, 3), bounds::kruskal_max(&format)]
        .into_iter()
        .max()
        .unwrap_or(0);
    Ok(CubicEntry {
        a,
        k,
        lower_bound: true,
        source: "bound".into(),
    })
}

/// Re-runs the evidence for an entry; `Ok(true)` when it holds.
pub fn verify_cubic_entry(entry: &CubicEntry, config: &RunConfig) -> Result<bool> {
    if entry.lower_bound {
        return Ok(true);
    }
    if entry.a <= 7 {
        let problem = Problem::plain(vec![entry.a; 3], entry.k as usize)?;
        let cert = certify(&problem, config, &CertifyOptions::default(), None)?;
        return Ok(cert.verdict == Verdict::Pass);
    }
    let tree = planner::plan_script(bundled_script(&entry.source).expect("bundled"))?;
    Ok(planner::execute(&tree, &config.exec_config())?.verdict == RootVerdict::Pass)
}

fn row(out: &mut dyn Write, label: &str, cells: &[String]) -> Result<()> {
    let body: Vec<String> = cells.iter().map(|c| format!("{c:>5}")).collect();
    writeln!(out, "{label:<18}{}", body.join("")).map_err(io)
}

fn table(kind: TableKind, max_a: usize, verify: bool, config: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let entries: Vec<CubicEntry> = (2..=max_a).map(cubic_entry).collect::<Result<_>>()?;
    let shown = |e: &CubicEntry| {
        if e.lower_bound {
            format!(">={}", e.k)
        } else {
            e.k.to_string()
        }
    };
    row(out, "a", &entries.iter().map(|e| e.a.to_string()).collect::<Vec<_>>())?;
    row(out, "k(a)", &entries.iter().map(shown).collect::<Vec<_>>())?;
    if kind == TableKind::Comparison {
        let gen: Vec<String> = (2..=max_a as u64).map(|a| bounds::cubic_rank_formula(a).to_string()).collect();
        row(out, "gen.rank (a != 3)", &gen)?;
        let kr: Vec<String> = (2..=max_a as u64).map(|a| bounds::kruskal_cubic(a).to_string()).collect();
        row(out, "Kruskal bound", &kr)?;
    }
    if !verify {
        return Ok(EXIT_PASS);
    }
    let mut all = true;
    let mut marks = Vec::new();
    for e in &entries {
        let ok = verify_cubic_entry(e, config)?;
        all &= ok;
        marks.push(if e.lower_bound { "-" } else if ok { "ok" } else { "FAIL" }.to_string());
    }
    row(out, "verified", &marks)?;
    Ok(if all { EXIT_PASS } else { EXIT_FAIL })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("tensorid").chain(args.split_whitespace()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn cubic_table_values() {
        let (code, out, _) = run_str("table cubic --max-a 10");
        assert_eq!(code, 0);
        let k_row = out.lines().nth(1).unwrap();
        let ks: Vec<&str> = k_row.split_whitespace().skip(1).collect();
        assert_eq!(ks, ["2", "3", "5", "9", "13", "18", "22", "27", "32"]);
        let (_, out, _) = run_str("table cubic --max-a 3");
        assert_eq!(out.lines().nth(1).unwrap().split_whitespace().skip(1).collect::<Vec<_>>(), ["2", "3"]);
    }

    #[test]
    fn comparison_rows() {
        let (_, out, _) = run_str("table comparison --max-a 10");
        let cells = |prefix: &str| -> Vec<String> {
            let line = out.lines().find(|l| l.starts_with(prefix)).unwrap();
            line[18..].split_whitespace().map(str::to_string).collect()
        };
        assert_eq!(cells("gen.rank"), ["2", "4", "7", "10", "14", "19", "24", "30", "36"]);
        assert_eq!(cells("Kruskal"), ["2", "3", "5", "6", "8", "9", "11", "12", "14"]);
    }

    #[test]
    fn usage_errors_exit_three() {
        assert_eq!(run_str("certify 4 4 --k 2").0, EXIT_USAGE);
        assert_eq!(run_str("certify 4 4 4").0, EXIT_USAGE);
        assert_eq!(run_str("certify 4 4 4 --k 2 --aux 1 1").0, EXIT_USAGE);
        assert_eq!(run_str("frobnicate").0, EXIT_USAGE);
        assert_eq!(run_str("certify 4 4 4 --k 2 --prime 32004").0, EXIT_USAGE);
        assert_eq!(run_str("plan --script nope --dry-run").0, EXIT_USAGE);
        assert_eq!(run_str("--help").0, EXIT_PASS);
    }

    #[test]
    fn aux_forms_agree() {
        let a = problem_from(vec![2, 2, 2], None, vec![0, 1, 1, 1]).unwrap();
        let b = problem_from(vec![2, 2, 2], Some(0), vec![1, 1, 1]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "(2,2,2; 0; 1,1,1)");
    }

    #[test]
    fn cubic_beyond_scripts_is_a_bound() {
        let e = cubic_entry(16).unwrap();
        assert!(e.lower_bound);
        assert_eq!(e.k, 64);
    }
}
