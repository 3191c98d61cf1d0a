//! Command-line front end. Exit codes: 0 ok, 1 runtime failure, 2 usage,
//! 3 cache mismatch, 4 uncertified input.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::json;

use crate::anytime::{CutoffPolicy, ScanReport};
use crate::cache::{self, CacheError, CacheManifest, CacheStats, JsonlCache};
use crate::hopf::{antipode_generator, birkhoff_decompose, char_from_halting, coproduct, HopfElement, HopfError};
use crate::machine::{encode_program, enumerate_programs, run, Alphabet, BudgetPolicy, Program};
use crate::numberings::{kolmogorov_order, ComplexityTable, RSequence, SweepRecord, Universal};
use crate::series::{
    classify_series, classify_sparse, phi_korder, psi_coeffs, psi_perm, ClassifyOptions, ExtendedFn, FinitePermutation, IntegerTranslation,
    PermutationOracle, SeriesError, ShiftPermutation,
};

#[derive(Debug, Parser)]
#[command(name = "haltreg", version, about = "Regularizing the halting problem on a small register machine")]
struct Cli {
    /// Cache directory [default: $HALTREG_CACHE_DIR or .haltreg-cache]
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List every valid program up to a size, with its numeric code.
    Enumerate {
        #[arg(long)]
        max_size: usize,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=64))]
        registers: u32,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(i32).range(1..=64))]
        max_offset: i32,
        #[arg(long)]
        json: bool,
    },
    /// Run one program on one input.
    Run {
        #[command(flatten)]
        program: ProgramArg,
        #[arg(long)]
        input: u64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Halted / ProvenDivergent / Unknown counts per input under a
    /// `c * x^e` step cut-off; writes cutoff_scan.json and cutoff_scan.csv.
    CutoffScan {
        /// Rational constant, e.g. `2` or `3/2`.
        #[arg(long, value_parser = parse_ratio)]
        c: Ratio<u64>,
        #[arg(long, default_value_t = 2)]
        exponent: u32,
        /// Inclusive input range `A..B`.
        #[arg(long, value_parser = parse_range)]
        inputs: (u64, u64),
        /// Scan every valid program up to this size.
        #[arg(long, required_unless_present = "programs", conflicts_with = "programs")]
        max_size: Option<usize>,
        /// Scan the programs in this file instead, one per line.
        #[arg(long)]
        programs: Option<PathBuf>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=64))]
        registers: u32,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(i32).range(0..=64))]
        max_offset: i32,
        /// Reference budget for the halting fraction.
        #[arg(long, default_value_t = 100_000)]
        super_budget: u64,
        #[arg(long, default_value_t = 4096)]
        space: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[command(flatten)]
        rebuild: Rebuild,
    },
    /// Budgeted complexity table of the universal evaluator, resumable
    /// through the cache; writes complexity.json and complexity.csv.
    Complexity {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        rebuild: Rebuild,
    },
    /// Generating series as exact rational coefficients.
    Series {
        kind: SeriesKind,
        #[command(flatten)]
        program: OptionalProgram,
        #[command(flatten)]
        perm: PermArgs,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, default_value_t = 64)]
        horizon: usize,
        #[arg(long)]
        classify: bool,
        /// Largest estimated coefficient tail accepted as summable.
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        table: TableArgs,
    },
    /// Coproduct, antipode or Birkhoff decomposition of one generator.
    Hopf {
        op: HopfOp,
        #[command(flatten)]
        program: ProgramArg,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, default_value_t = 4)]
        grade_max: usize,
        #[arg(long, default_value_t = 8)]
        truncation: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SeriesKind {
    Psi,
    PsiPerm,
    PhiK,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum HopfOp {
    Coproduct,
    Antipode,
    Birkhoff,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RChoice {
    /// `R_l = 2^l`
    Pow2,
    /// `R_l = l`
    Identity,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct ProgramArg {
    /// Program text; `;` separates instructions.
    #[arg(long)]
    program: Option<String>,
    /// File with one instruction per line.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct OptionalProgram {
    #[arg(long)]
    program: Option<String>,
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
struct PermArgs {
    /// Disjoint cycles, e.g. `1 2 3; 4 5`.
    #[arg(long)]
    cycles: Option<String>,
    /// Translation of the integers by this step, carried to the naturals.
    #[arg(long, allow_hyphen_values = true)]
    translate: Option<i64>,
    /// `n -> n + 1`.
    #[arg(long)]
    shift: bool,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 100_000)]
    steps: u64,
    #[arg(long, default_value_t = 4096)]
    space: u64,
}

#[derive(Debug, Args)]
struct TableArgs {
    /// Step budget per index of the universal sweep.
    #[arg(long, default_value_t = 2000)]
    table_steps: u64,
    #[arg(long, default_value_t = 4096)]
    table_space: u64,
    /// Indices swept.
    #[arg(long, default_value_t = 20_000)]
    k_max: u64,
    #[arg(long, value_enum, default_value_t = RChoice::Pow2)]
    r: RChoice,
}

#[derive(Debug, Args)]
struct Rebuild {
    /// Discard a cache that does not match instead of failing.
    #[arg(long)]
    rebuild: bool,
}

fn parse_ratio(s: &str) -> Result<Ratio<u64>, String> {
    let r: Ratio<u64> = s.parse().map_err(|e| format!("{s:?}: {e}"))?;
    if r == Ratio::from_integer(0) {
        return Err("c must be positive".into());
    }
    Ok(r)
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a: u64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: u64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a == 0 || a > b {
        return Err(format!("need 1 <= A <= B, got {a}..{b}"));
    }
    Ok((a, b))
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Cache(CacheError),
    Uncertified(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Cache(CacheError::Io { .. } | CacheError::Machine(_)) => 1,
            Failure::Cache(_) => 3,
            Failure::Uncertified(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Other(m) => f.write_str(m),
            Failure::Cache(e) => write!(f, "{e}"),
            Failure::Uncertified(m) => write!(f, "uncertified: {m}"),
        }
    }
}

impl From<CacheError> for Failure {
    fn from(e: CacheError) -> Self {
        Failure::Cache(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

impl From<SeriesError> for Failure {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::UncertifiedInput(x) => Failure::Uncertified(format!("halting status at index {x} is not certified")),
            SeriesError::OutsideCertifiedPrefix(what) => Failure::Uncertified(format!("{what} is outside the certified prefix")),
            other => Failure::Other(other.to_string()),
        }
    }
}

impl From<HopfError> for Failure {
    fn from(e: HopfError) -> Self {
        match e {
            HopfError::UncertifiedGenerator(g) => Failure::Uncertified(format!("generator [{g}]")),
            other => Failure::Other(other.to_string()),
        }
    }
}

/// Parses `std::env::args` and runs the command.
pub fn main() -> ExitCode {
    run_with(std::env::args_os())
}

pub fn run_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let dir = cli.cache_dir.clone().unwrap_or_else(cache::default_dir);
    let mut out = io::stdout().lock();
    match dispatch(cli.command, &dir, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = out.flush();
            eprintln!("haltreg: {f}");
            ExitCode::from(f.code())
        }
    }
}

fn dispatch(command: Command, dir: &Path, out: &mut impl Write) -> Result<(), Failure> {
    match command {
        Command::Enumerate { max_size, registers, max_offset, json } => enumerate(out, max_size, Alphabet::new(registers, max_offset), json),
        Command::Run { program, input, budget } => {
            let p = load_program(program.program, program.file)?;
            let outcome = run(&p, input, budget.steps, budget.space).map_err(|e| Failure::Usage(e.to_string()))?;
            write_json(out, &json!({ "program": p.to_string(), "input": input, "outcome": outcome }))
        }
        Command::CutoffScan { c, exponent, inputs, max_size, programs, registers, max_offset, super_budget, space, out: out_dir, rebuild } => {
            let (programs, label) = match (max_size, programs) {
                (Some(m), _) => {
                    let alphabet = Alphabet::new(registers, max_offset);
                    (enumerate_programs(&alphabet, m), cache::alphabet_set_label(&alphabet, m))
                }
                (None, Some(f)) => {
                    let list = load_program_list(&f)?;
                    let label = cache::list_set_label(&list);
                    (list, label)
                }
                (None, None) => return Err(Failure::Usage("--max-size or --programs is required".into())),
            };
            let policy = CutoffPolicy { c, exponent, space_budget: space };
            if rebuild.rebuild {
                JsonlCache::<crate::anytime::ScanRow>::discard(dir, &cache::scan_manifest(&label, &policy, super_budget))?;
            }
            let (report, stats) = cache::cached_cutoff_scan(dir, &programs, &label, inputs.0..=inputs.1, &policy, super_budget)?;
            report_stats(&stats);
            write_scan(&out_dir, &report)?;
            writeln!(out, "{} programs, {} inputs -> {}", report.programs, report.rows.len(), out_dir.display())?;
            Ok(())
        }
        Command::Complexity { table, out: out_dir, rebuild } => {
            if rebuild.rebuild {
                JsonlCache::<SweepRecord>::discard(dir, &universal(&table).1)?;
            }
            let t = complexity(dir, &table)?;
            let summary = json!({
                "r": t.r_label,
                "step_budget": t.step_budget,
                "k_max": t.k_max,
                "resolved_prefix": t.resolved_prefix,
                "certified_prefix": t.certified_prefix(),
                "distinct_outputs": t.entries.len(),
                "unknown": t.unknown,
                "total_steps": t.total_steps,
            });
            if let Some(d) = out_dir {
                fs::create_dir_all(&d)?;
                fs::write(d.join("complexity.json"), serde_json::to_string_pretty(&t).map_err(other)? + "\n")?;
                let mut w = csv::Writer::from_path(d.join("complexity.csv")).map_err(other)?;
                w.write_record(["x", "upper", "certified"]).map_err(other)?;
                for (x, e) in &t.entries {
                    w.write_record([x.to_string(), e.upper.to_string(), e.certified.to_string()]).map_err(other)?;
                }
                w.flush()?;
            }
            write_json(out, &summary)
        }
        Command::Series { kind, program, perm, k, horizon, classify, tolerance, budget, table } => {
            series(out, dir, kind, program, perm, k, horizon, classify, tolerance, budget, table)
        }
        Command::Hopf { op, program, k, grade_max, truncation, budget, json } => {
            let p = load_program(program.program, program.file)?;
            hopf(out, op, p, k, grade_max, truncation, BudgetPolicy::new(budget.steps, budget.space), json)
        }
    }
}

fn other(e: impl std::fmt::Display) -> Failure {
    Failure::Other(e.to_string())
}

fn report_stats(stats: &CacheStats) {
    eprintln!("cache: {} reused, {} computed", stats.reused, stats.computed);
}

fn write_json(out: &mut impl Write, v: &impl Serialize) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(other)?;
    writeln!(out)?;
    Ok(())
}

fn load_program(text: Option<String>, file: Option<PathBuf>) -> Result<Program, Failure> {
    let src = match (text, file) {
        (Some(t), _) => t,
        (None, Some(f)) => fs::read_to_string(&f).map_err(|e| Failure::Usage(format!("{}: {e}", f.display())))?,
        (None, None) => return Err(Failure::Usage("a program is required (--program or --file)".into())),
    };
    src.parse().map_err(|e| Failure::Usage(format!("program: {e}")))
}

/// One program per nonblank line, `;` between instructions, `#` comments.
fn load_program_list(path: &Path) -> Result<Vec<Program>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.split('#').next().unwrap_or("").trim().is_empty())
        .map(|(i, l)| l.parse().map_err(|e| Failure::Usage(format!("{} line {}: {e}", path.display(), i + 1))))
        .collect()
}

fn enumerate(out: &mut impl Write, max_size: usize, alphabet: Alphabet, json: bool) -> Result<(), Failure> {
    let programs = enumerate_programs(&alphabet, max_size);
    if json {
        let list: Vec<_> = programs.iter().map(|p| json!({ "code": encode_program(p).to_string(), "program": p.to_string() })).collect();
        return write_json(out, &json!({ "count": programs.len(), "programs": list }));
    }
    for p in &programs {
        let text = if p.is_empty() { "(empty)".to_string() } else { p.to_string() };
        writeln!(out, "{}\t{text}", encode_program(p))?;
    }
    writeln!(out, "count {}", programs.len())?;
    Ok(())
}

/// CSV columns: x, budget, halted, proven_divergent, unknown, halted_super,
/// halting_fraction (empty when nothing halts within the super-budget).
fn write_scan(dir: &Path, report: &ScanReport) -> Result<(), Failure> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("cutoff_scan.json"), serde_json::to_string_pretty(report).map_err(other)? + "\n")?;
    let mut w = csv::Writer::from_path(dir.join("cutoff_scan.csv")).map_err(other)?;
    w.write_record(["x", "budget", "halted", "proven_divergent", "unknown", "halted_super", "halting_fraction"]).map_err(other)?;
    for r in &report.rows {
        w.write_record([
            r.x.to_string(),
            r.budget.to_string(),
            r.halted.to_string(),
            r.proven_divergent.to_string(),
            r.unknown.to_string(),
            r.halted_super.to_string(),
            r.halting_fraction.map(|f| f.to_string()).unwrap_or_default(),
        ])
        .map_err(other)?;
    }
    w.flush()?;
    Ok(())
}

fn universal(table: &TableArgs) -> (Universal, CacheManifest) {
    let r = match table.r {
        RChoice::Pow2 => RSequence::powers_of_two(),
        RChoice::Identity => RSequence::identity(),
    };
    let u = Universal::with_capacity(r, table.k_max as usize);
    let m = cache::sweep_manifest(&u, table.table_steps, table.table_space);
    (u, m)
}

fn complexity(dir: &Path, table: &TableArgs) -> Result<ComplexityTable, Failure> {
    let (u, _) = universal(table);
    let (t, stats) = cache::cached_complexity_table(dir, &u, table.table_steps, table.table_space, table.k_max)?;
    report_stats(&stats);
    Ok(t)
}

fn permutation(perm: &PermArgs) -> Result<Box<dyn PermutationOracle>, Failure> {
    if let Some(text) = &perm.cycles {
        let cycles = text
            .split(';')
            .map(|c| c.split(|ch: char| ch.is_whitespace() || ch == ',').filter(|t| !t.is_empty()).map(str::parse).collect::<Result<Vec<u64>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Usage(format!("--cycles: {e}")))?;
        let p = FinitePermutation::from_cycles(&cycles).map_err(|e| Failure::Usage(format!("--cycles: {e}")))?;
        return Ok(Box::new(p));
    }
    if let Some(step) = perm.translate {
        return Ok(Box::new(IntegerTranslation { step }));
    }
    if perm.shift {
        return Ok(Box::new(ShiftPermutation));
    }
    Err(Failure::Usage("a permutation is required (--cycles, --translate or --shift)".into()))
}

#[allow(clippy::too_many_arguments)]
fn series(
    out: &mut impl Write,
    dir: &Path,
    kind: SeriesKind,
    program: OptionalProgram,
    perm: PermArgs,
    k: u64,
    horizon: usize,
    classify: bool,
    tolerance: f64,
    budget: BudgetArgs,
    table: TableArgs,
) -> Result<(), Failure> {
    if !(tolerance > 0.0) {
        return Err(Failure::Usage("--tolerance must be positive".into()));
    }
    let opts = ClassifyOptions { tolerance, ..Default::default() };
    let verdict = |r: Result<crate::series::Classification, SeriesError>| match r {
        Ok(c) => json!(c),
        Err(e) => json!({ "inconclusive": e.to_string() }),
    };
    if k == 0 {
        return Err(Failure::Usage("--k must be positive".into()));
    }
    match kind {
        SeriesKind::Psi => {
            let p = load_program(program.program, program.file)?;
            let ef = ExtendedFn::new(p, BudgetPolicy::new(budget.steps, budget.space));
            let s = psi_coeffs(&ef, k, horizon)?;
            let classification = classify.then(|| verdict(classify_series(&s, &opts)));
            write_json(out, &SeriesOut { permutation: None, korder_len: None, series: &s, classification })
        }
        SeriesKind::PsiPerm => {
            let sigma = permutation(&perm)?;
            let s = psi_perm(sigma.as_ref(), k, horizon)?;
            let classification = classify.then(|| verdict(classify_series(&s, &opts)));
            write_json(out, &SeriesOut { permutation: Some(sigma.describe()), korder_len: None, series: &s, classification })
        }
        SeriesKind::PhiK => {
            let sigma = permutation(&perm)?;
            let t = complexity(dir, &table)?;
            let korder = kolmogorov_order(&t).map_err(|e| Failure::Uncertified(e.to_string()))?;
            let s = phi_korder(sigma.as_ref(), k, &korder, horizon)?;
            let classification = classify.then(|| verdict(classify_sparse(&s, &opts)));
            write_json(out, &SeriesOut { permutation: Some(sigma.describe()), korder_len: Some(korder.len()), series: &s, classification })
        }
    }
}

#[derive(Serialize)]
struct SeriesOut<'a, S> {
    #[serde(skip_serializing_if = "Option::is_none")]
    permutation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    korder_len: Option<usize>,
    series: &'a S,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<serde_json::Value>,
}

#[allow(clippy::too_many_arguments)]
fn hopf(out: &mut impl Write, op: HopfOp, p: Program, k: u64, grade_max: usize, truncation: usize, policy: BudgetPolicy, json: bool) -> Result<(), Failure> {
    if p.is_empty() {
        return Err(Failure::Usage("the empty program is the unit, not a generator".into()));
    }
    match op {
        HopfOp::Coproduct | HopfOp::Antipode => {
            let x = HopfElement::generator(p.clone());
            let text = match op {
                HopfOp::Coproduct => coproduct(&x).to_string(),
                _ => antipode_generator(&p).to_string(),
            };
            if json {
                let name = if matches!(op, HopfOp::Coproduct) { "coproduct" } else { "antipode" };
                write_json(out, &json!({ "program": p.to_string(), name: text }))
            } else {
                writeln!(out, "{text}")?;
                Ok(())
            }
        }
        HopfOp::Birkhoff => {
            if k == 0 {
                return Err(Failure::Usage("--k must be positive".into()));
            }
            let phi = char_from_halting(k, std::slice::from_ref(&p), &policy, truncation)?;
            let pair = birkhoff_decompose(&phi, grade_max)?;
            let rows: Vec<_> = pair
                .checks
                .iter()
                .map(|c| {
                    let g = &c.generator;
                    let v = |ch: &crate::hopf::Character<Program>| ch.value(g).map(|v| v.to_string());
                    Ok(json!({
                        "generator": g.to_string(),
                        "phi": v(&phi)?,
                        "phi_minus": v(&pair.minus)?,
                        "phi_plus": v(&pair.plus)?,
                        "identity": if c.identity_holds { "PASS" } else { "FAIL" },
                        "plus_polar_free": c.plus_polar_free,
                        "minus_polar": c.minus_polar,
                    }))
                })
                .collect::<Result<_, HopfError>>()?;
            if json {
                return write_json(out, &json!({ "k": k, "grade_max": grade_max, "truncation": truncation, "generators": rows }));
            }
            for c in &pair.checks {
                let g = &c.generator;
                writeln!(out, "[{g}]")?;
                writeln!(out, "  φ  = {}", phi.value(g)?)?;
                writeln!(out, "  φ₋ = {}", pair.minus.value(g)?)?;
                writeln!(out, "  φ₊ = {}", pair.plus.value(g)?)?;
                writeln!(out, "  φ₋∗φ = φ₊ {}", if c.identity_holds { "PASS" } else { "FAIL" })?;
                if !c.plus_polar_free || !c.minus_polar {
                    writeln!(out, "  pole conditions FAIL")?;
                }
            }
            Ok(())
        }
    }
}
