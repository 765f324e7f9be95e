//! Single executable over the workbench: family verification, explicit
//! constructions, bound tables, minimum search, influence and rank reports.
//!
//! Every run is determined by its arguments (seeds included); JSON reports
//! carry `"schema": "saturata/1"` and a timestamp that `--no-timestamp`
//! suppresses, so identical invocations produce byte-identical output.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use saturata::boxalg;
use saturata::bounds::{self, BoundReport};
use saturata::constructions::{self, SearchMode};
use saturata::influence::{self, rational_string, rational_to_f64, LogBase};
use saturata::io::{self, FamilyFormat};
use saturata::ranklab::{self, RefinementVerdict, UpsetPolicy};
use saturata::{Mask, SetFamily};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

mod selftest;

/// Default cap on ground sets; `O(n²·2^n)` kernels stay interactive here.
const TRANSFORM_GUARD: usize = 22;
/// `O(3^n)`-class paths (greedy saturation, the naive product, the matching
/// dynamic program) are refused above this without `--force`.
const CUBIC_GUARD: usize = 16;

#[derive(Parser)]
#[command(name = "saturata", version, about = "Verification and exploration workbench for saturated set families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: $SATURATA_WORKERS, then all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Lift the size guards on expensive paths.
    #[arg(long, global = true)]
    force: bool,
    /// Omit the timestamp field from JSON reports.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check saturation, structural identities, and size bounds of a family
    /// file; with several files, check cross-saturation of the sequence.
    Verify(VerifyArgs),
    /// Write a star, block, or random greedy-saturated family file.
    Construct(ConstructArgs),
    /// Tabulate the bound formulas over an (n, s) grid.
    Bounds(BoundsArgs),
    /// Minimum saturated family size, exact (tiny n) or stochastic.
    Search(SearchArgs),
    /// Influence report and the KKL inequality verdicts.
    Influence(InfluenceArgs),
    /// Exact ranks of the product-polynomial levels.
    Ranklab(RanklabArgs),
    /// Quick end-to-end self-check of the whole pipeline.
    Selftest,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Family file (JSON or compact). Repeat for a cross-saturation check.
    #[arg(long, required = true)]
    file: Vec<PathBuf>,
    /// Matching size s (unused for cross checks, where s = number of files).
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, value_enum, default_value_t = LogArg::Natural)]
    log: LogArg,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    format: ReportFormat,
}

#[derive(clap::Args)]
struct ConstructArgs {
    #[arg(value_enum)]
    kind: ConstructKind,
    n: usize,
    s: usize,
    /// Seed for the random kind.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Number of families for the random kind.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Output path; `--count k` appends `_0.._k-1` before the extension.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FileFormatArg::Json)]
    format: FileFormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructKind {
    Star,
    Block,
    Random,
}

#[derive(clap::Args)]
struct BoundsArgs {
    /// Ground-set size or inclusive range `a..b`.
    #[arg(long)]
    n: String,
    /// Matching size or inclusive range `a..b`.
    #[arg(long)]
    s: String,
    /// Add the normalized gap column `(n/2 − g)/√n`.
    #[arg(long)]
    trend: bool,
    #[arg(long, value_enum, default_value_t = GridFormat::Table)]
    format: GridFormat,
}

#[derive(clap::Args)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Greedy runs in stochastic mode.
    #[arg(long, default_value_t = 100)]
    budget: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also write the witness family here, re-verifiable with `verify`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FileFormatArg::Json)]
    format: FileFormatArg,
}

#[derive(clap::Args)]
struct InfluenceArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = LogArg::Natural)]
    log: LogArg,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    format: ReportFormat,
}

#[derive(clap::Args)]
struct RanklabArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long)]
    s: usize,
    /// Upset refinement: pick a small union automatically, or skip.
    #[arg(long, value_enum, default_value_t = G0Arg::Auto)]
    g0: G0Arg,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    format: ReportFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogArg {
    Natural,
    Two,
}

impl From<LogArg> for LogBase {
    fn from(a: LogArg) -> LogBase {
        match a {
            LogArg::Natural => LogBase::Natural,
            LogArg::Two => LogBase::Two,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridFormat {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormatArg {
    Json,
    Compact,
}

impl From<FileFormatArg> for FamilyFormat {
    fn from(a: FileFormatArg) -> FamilyFormat {
        match a {
            FileFormatArg::Json => FamilyFormat::Json,
            FileFormatArg::Compact => FamilyFormat::Compact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Stochastic,
}

#[derive(Clone, Copy, ValueEnum)]
enum G0Arg {
    Auto,
    None,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_workers(cli.workers);
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn init_workers(flag: Option<usize>) {
    let workers = flag.or_else(|| {
        std::env::var("SATURATA_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(w) = workers.filter(|&w| w > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Verify(args) => cmd_verify(cli, args),
        Command::Construct(args) => cmd_construct(cli, args),
        Command::Bounds(args) => cmd_bounds(cli, args),
        Command::Search(args) => cmd_search(cli, args),
        Command::Influence(args) => cmd_influence(cli, args),
        Command::Ranklab(args) => cmd_ranklab(cli, args),
        Command::Selftest => selftest::run(),
    }
}

fn ground_cap(cli: &Cli) -> usize {
    if cli.force {
        saturata::family::ABSOLUTE_GROUND_SET_CAP
    } else {
        TRANSFORM_GUARD
    }
}

fn check_cubic_guard(cli: &Cli, n: usize, what: &str) -> Result<()> {
    if !cli.force && n > CUBIC_GUARD {
        bail!("{what} costs O(3^n) and is refused above n = {CUBIC_GUARD}; pass --force to override");
    }
    Ok(())
}

fn read_family(cli: &Cli, path: &Path) -> Result<SetFamily> {
    io::read_family_file_with_cap(path, ground_cap(cli))
        .with_context(|| format!("reading {}", path.display()))
}

fn report_base(cli: &Cli, command: &str) -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("schema".into(), json!("saturata/1"));
    if !cli.no_timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        map.insert("timestamp".into(), json!(secs));
    }
    map.insert("command".into(), json!(command));
    map
}

fn mask_elements(m: Mask) -> Value {
    json!(m.elements().collect::<Vec<_>>())
}

fn verdict_mark(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

// ---------------------------------------------------------------- verify

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<bool> {
    if args.file.len() > 1 {
        return cmd_verify_cross(cli, args);
    }
    let path = &args.file[0];
    let s = args
        .s
        .ok_or_else(|| anyhow!("--s is required when verifying a single family"))?;
    let f = read_family(cli, path)?;
    let n = f.n();
    let log_base: LogBase = args.log.into();
    let verdict = f.check_saturation(s)?;

    let mut pass = verdict.is_saturated();
    let mut out = report_base(cli, "verify");
    out.insert("file".into(), json!(path.display().to_string()));
    out.insert("n".into(), json!(n));
    out.insert("s".into(), json!(s));
    out.insert("size".into(), json!(f.len()));
    out.insert(
        "saturation".into(),
        json!({
            "matching_free": verdict.matching_free,
            "maximal": verdict.maximal,
            "saturated": verdict.is_saturated(),
            "matching_witness": verdict.matching_witness.as_ref().map(|w| {
                w.iter().map(|&m| mask_elements(m)).collect::<Vec<_>>()
            }),
            "addable_witness": verdict.addable_witness.map(mask_elements),
        }),
    );

    let mut identities = None;
    let mut bound_report = None;
    if verdict.is_saturated() {
        let suite = identity_suite(&f, s, log_base)?;
        pass &= suite.asserted_pass;
        out.insert("identities".into(), identity_json(&suite, log_base));
        identities = Some(suite);
        let report = bounds::bound_report_presaturated(&f, s, log_base)?;
        pass &= report.all_asserted_pass();
        out.insert("bounds".into(), bound_report_json(&report));
        bound_report = Some(report);
    }
    out.insert("pass".into(), json!(pass));

    match args.format {
        ReportFormat::Json => println!("{}", serde_json::to_string_pretty(&Value::Object(out))?),
        ReportFormat::Table => print_verify_table(
            path,
            s,
            &f,
            &verdict,
            identities.as_ref(),
            bound_report.as_ref(),
            pass,
        ),
    }
    Ok(pass)
}

struct IdentityOutcome {
    skipped: Option<String>,
    increasing: bool,
    complement_bar: bool,
    containment: (u64, u64),
    occurrence: (u64, u64),
    good_section: Option<influence::GoodSectionBound>,
    asserted_pass: bool,
}

/// The structural identity checks for a family already known `s`-saturated:
/// increasing, the complement-bar power identity, the section containments
/// for every `(x, t)`, the section counting inequality for every `x`, and
/// the good-coordinate section bound.
fn identity_suite(f: &SetFamily, s: usize, log_base: LogBase) -> Result<IdentityOutcome> {
    let n = f.n();
    if s > n + 1 {
        return Ok(IdentityOutcome {
            skipped: Some(format!(
                "identity suite covers 2 <= s <= n+1; got s={s}, n={n}"
            )),
            increasing: true,
            complement_bar: true,
            containment: (0, 0),
            occurrence: (0, 0),
            good_section: None,
            asserted_pass: true,
        });
    }
    let increasing = f.is_increasing();
    let complement_bar = boxalg::box_power(f, s - 1) == f.complement().bar();

    let mut containment = (0u64, 0u64);
    let mut occurrence = (0u64, 0u64);
    let mut good_section = None;
    if n >= 2 {
        for x in 1..=n {
            for t in 0..=s - 1 {
                containment.0 += 1;
                if boxalg::section_complement_containment_presaturated(f, s, x, t)? {
                    containment.1 += 1;
                }
            }
            occurrence.0 += 1;
            if boxalg::section_occurrence_bound_presaturated(f, s, x)?.holds {
                occurrence.1 += 1;
            }
        }
        good_section = Some(influence::good_section_bound_presaturated(f, s, log_base)?);
    }
    let good_section_pass = match (&good_section, log_base) {
        (Some(g), LogBase::Natural) => g.holds,
        _ => true, // base-2 runs are experiments, never asserted
    };
    let asserted_pass = increasing
        && complement_bar
        && containment.0 == containment.1
        && occurrence.0 == occurrence.1
        && good_section_pass;
    Ok(IdentityOutcome {
        skipped: None,
        increasing,
        complement_bar,
        containment,
        occurrence,
        good_section,
        asserted_pass,
    })
}

fn identity_json(suite: &IdentityOutcome, log_base: LogBase) -> Value {
    if let Some(reason) = &suite.skipped {
        return json!({ "skipped": reason });
    }
    json!({
        "increasing": suite.increasing,
        "complement_bar_power": suite.complement_bar,
        "section_containment": {"checked": suite.containment.0, "passed": suite.containment.1},
        "section_occurrence": {"checked": suite.occurrence.0, "passed": suite.occurrence.1},
        "good_section": suite.good_section.as_ref().map(|g| json!({
            "coordinate": g.coordinate,
            "ratio": rational_string(&g.ratio),
            "ratio_approx": rational_to_f64(&g.ratio),
            "bound": g.bound,
            "holds": g.holds,
            "asserted": matches!(log_base, LogBase::Natural),
        })),
    })
}

fn bound_report_json(r: &BoundReport) -> Value {
    json!({
        "family_size": r.family_size,
        "thm_blms": rational_string(&r.thm_blms),
        "thm_blms_ceil": r.thm_blms_ceil().to_string(),
        "thm_kkl": r.thm_kkl,
        "g": r.g_value,
        "thm_main": r.thm_main.as_ref().map(rational_string),
        "thm_main_ceil": r.thm_main_ceil().map(|c| c.to_string()),
        "conjecture": rational_string(&r.conjecture),
        "log_base": r.log_base.label(),
        "verdicts": {
            "meets_blms": r.verdicts.meets_blms,
            "meets_kkl": r.verdicts.meets_kkl,
            "meets_main": r.verdicts.meets_main,
            "meets_conjecture_informative": r.verdicts.meets_conjecture,
        },
    })
}

fn print_verify_table(
    path: &Path,
    s: usize,
    f: &SetFamily,
    verdict: &saturata::SaturationVerdict,
    identities: Option<&IdentityOutcome>,
    bound_report: Option<&BoundReport>,
    pass: bool,
) {
    println!("family {} (n={}, size={})", path.display(), f.n(), f.len());
    println!(
        "saturation (s={s}): matching-free {} / maximal {}",
        verdict_mark(verdict.matching_free),
        verdict_mark(verdict.maximal)
    );
    if let Some(w) = &verdict.matching_witness {
        let picks: Vec<String> = w.iter().map(|m| m.to_string()).collect();
        println!("  disjoint members: {}", picks.join(" "));
    }
    if let Some(m) = verdict.addable_witness {
        println!("  addable without a matching: {m}");
    }
    if let Some(suite) = identities {
        if let Some(reason) = &suite.skipped {
            println!("identities: skipped ({reason})");
        } else {
            println!("identities:");
            println!("  increasing: {}", verdict_mark(suite.increasing));
            println!(
                "  complement-bar power identity: {}",
                verdict_mark(suite.complement_bar)
            );
            println!(
                "  section containments: {}/{} pass",
                suite.containment.1, suite.containment.0
            );
            println!(
                "  section occurrence bounds: {}/{} pass",
                suite.occurrence.1, suite.occurrence.0
            );
            if let Some(g) = &suite.good_section {
                println!(
                    "  good section: coordinate {} ratio {} (~{:.6}) <= {:.6} -> {}",
                    g.coordinate,
                    rational_string(&g.ratio),
                    rational_to_f64(&g.ratio),
                    g.bound,
                    verdict_mark(g.holds)
                );
            }
        }
    }
    if let Some(r) = bound_report {
        println!("bounds:");
        println!(
            "  (1-1/s)*2^n         = {:>12}  {}",
            rational_string(&r.thm_blms),
            verdict_mark(r.verdicts.meets_blms)
        );
        if let (Some(main), Some(ok)) = (&r.thm_main, r.verdicts.meets_main) {
            println!(
                "  main bound (g={})    = {:>12}  {}",
                r.g_value.unwrap_or(0),
                rational_string(main),
                verdict_mark(ok)
            );
        }
        if let (Some(kkl), Some(ok)) = (r.thm_kkl, r.verdicts.meets_kkl) {
            let note = if matches!(r.log_base, LogBase::Natural) {
                ""
            } else {
                ", not asserted"
            };
            println!(
                "  influence bound     = {kkl:>12.4}  {} ({} log{note})",
                verdict_mark(ok),
                r.log_base.label()
            );
        }
        println!(
            "  conjectured optimum = {:>12}  {} (informative)",
            rational_string(&r.conjecture),
            verdict_mark(r.verdicts.meets_conjecture)
        );
    }
    println!("verdict: {}", if pass { "PASS" } else { "FAIL" });
}

// ---------------------------------------------------------------- cross

fn cmd_verify_cross(cli: &Cli, args: &VerifyArgs) -> Result<bool> {
    let fams: Vec<SetFamily> = args
        .file
        .iter()
        .map(|p| read_family(cli, p))
        .collect::<Result<_>>()?;
    let report = bounds::cross_saturated_check(&fams)?;
    let pass = report.is_cross_saturated && report.holds;
    let mut out = report_base(cli, "verify-cross");
    out.insert(
        "files".into(),
        json!(args
            .file
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()),
    );
    out.insert("n".into(), json!(report.n));
    out.insert("s".into(), json!(report.s));
    out.insert("transversal_free".into(), json!(report.transversal_free));
    out.insert("maximal".into(), json!(report.maximal));
    out.insert("is_cross_saturated".into(), json!(report.is_cross_saturated));
    out.insert(
        "transversal".into(),
        json!(report
            .transversal
            .as_ref()
            .map(|t| t.iter().map(|&m| mask_elements(m)).collect::<Vec<_>>())),
    );
    out.insert(
        "violation".into(),
        json!(report
            .violation
            .map(|(i, m)| json!({"family_index": i, "mask": mask_elements(m)}))),
    );
    out.insert("total".into(), json!(report.total));
    out.insert("bound".into(), json!(report.bound));
    out.insert("holds".into(), json!(report.holds));
    out.insert("pass".into(), json!(pass));
    match args.format {
        ReportFormat::Json => println!("{}", serde_json::to_string_pretty(&Value::Object(out))?),
        ReportFormat::Table => {
            println!("cross check over {} families (n={})", report.s, report.n);
            println!("  transversal-free: {}", verdict_mark(report.transversal_free));
            println!("  maximal:          {}", verdict_mark(report.maximal));
            println!(
                "  size total {} vs (s-1)*2^n = {} -> {}",
                report.total,
                report.bound,
                verdict_mark(report.holds)
            );
            if let Some(t) = &report.transversal {
                let picks: Vec<String> = t.iter().map(|m| m.to_string()).collect();
                println!("  disjoint picks: {}", picks.join(" "));
            }
            if let Some((i, m)) = report.violation {
                println!("  family {} can absorb {m} without creating picks", i + 1);
            }
        }
    }
    Ok(pass)
}

// ---------------------------------------------------------------- construct

fn cmd_construct(cli: &Cli, args: &ConstructArgs) -> Result<bool> {
    let format: FamilyFormat = args.format.into();
    match args.kind {
        ConstructKind::Star => {
            let f = constructions::star_family(args.n, args.s)?;
            io::write_family_file(&args.out, &f, format)?;
            println!(
                "star family n={} s={}: size {} -> {}",
                args.n,
                args.s,
                f.len(),
                args.out.display()
            );
        }
        ConstructKind::Block => {
            let bc = constructions::block_family(args.n, args.s)?;
            io::write_family_file(&args.out, &bc.family, format)?;
            let blocks: Vec<String> = bc.blocks.iter().map(|b| b.to_string()).collect();
            println!(
                "block family n={} s={}: m={} r={} blocks {} free {} size {} -> {}",
                args.n,
                args.s,
                bc.m,
                bc.r,
                blocks.join(" "),
                bc.free,
                bc.family.len(),
                args.out.display()
            );
        }
        ConstructKind::Random => {
            check_cubic_guard(cli, args.n, "greedy saturation")?;
            let fams = constructions::random_saturated(args.n, args.s, args.seed, args.count)?;
            for (k, f) in fams.iter().enumerate() {
                let path = if args.count == 1 {
                    args.out.clone()
                } else {
                    indexed_path(&args.out, k)
                };
                io::write_family_file(&path, f, format)?;
                println!(
                    "random saturated n={} s={} seed={} [{}]: size {} -> {}",
                    args.n,
                    args.s,
                    args.seed,
                    k,
                    f.len(),
                    path.display()
                );
            }
        }
    }
    Ok(true)
}

fn indexed_path(base: &Path, k: usize) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("family");
    let ext = base.extension().and_then(|s| s.to_str());
    let name = match ext {
        Some(e) => format!("{stem}_{k}.{e}"),
        None => format!("{stem}_{k}"),
    };
    base.with_file_name(name)
}

// ---------------------------------------------------------------- bounds

fn parse_range(text: &str) -> Result<(usize, usize)> {
    if let Some((a, b)) = text.split_once("..") {
        let lo: usize = a.trim().parse().context("range start")?;
        let hi: usize = b.trim().parse().context("range end")?;
        if lo > hi {
            bail!("empty range {text}");
        }
        Ok((lo, hi))
    } else {
        let v: usize = text.trim().parse().context("range value")?;
        Ok((v, v))
    }
}

fn cmd_bounds(cli: &Cli, args: &BoundsArgs) -> Result<bool> {
    let (n_lo, n_hi) = parse_range(&args.n)?;
    let (s_lo, s_hi) = parse_range(&args.s)?;
    if n_lo == 0 || s_lo < 2 {
        bail!("bounds need n >= 1 and s >= 2");
    }
    let mut header = vec![
        "n", "s", "g", "thm_blms", "thm_kkl_natural", "thm_kkl_base2", "thm_main", "conjecture",
    ];
    if args.trend {
        header.push("gap_over_sqrt_n");
    }
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut json_rows: Vec<Value> = Vec::new();
    for n in n_lo..=n_hi {
        for s in s_lo..=s_hi.min(n + 1) {
            let g = bounds::g_of(n, s)?;
            let blms = bounds::blms_bound(n, s);
            let kkl_nat = bounds::kkl_bound(n, s, LogBase::Natural);
            let kkl_two = bounds::kkl_bound(n, s, LogBase::Two);
            let main = bounds::main_bound(n, s)?;
            let conj = bounds::conjecture_bound(n, s);
            let mut row = vec![
                n.to_string(),
                s.to_string(),
                g.to_string(),
                rational_string(&blms),
                format!("{kkl_nat:.6}"),
                format!("{kkl_two:.6}"),
                rational_string(&main),
                rational_string(&conj),
            ];
            if args.trend {
                row.push(format!("{:.6}", bounds::g_gap_trend(n, s)?));
            }
            if matches!(args.format, GridFormat::Json) {
                let mut obj = json!({
                    "n": n, "s": s, "g": g,
                    "thm_blms": rational_string(&blms),
                    "thm_kkl_natural": kkl_nat,
                    "thm_kkl_base2": kkl_two,
                    "thm_main": rational_string(&main),
                    "conjecture": rational_string(&conj),
                });
                if args.trend {
                    obj["gap_over_sqrt_n"] = json!(bounds::g_gap_trend(n, s)?);
                }
                json_rows.push(obj);
            }
            rows.push(row);
        }
    }
    match args.format {
        GridFormat::Csv => {
            println!("{}", header.join(","));
            for row in rows {
                println!("{}", row.join(","));
            }
        }
        GridFormat::Table => print_table(&header, &rows),
        GridFormat::Json => {
            let mut out = report_base(cli, "bounds");
            out.insert("rows".into(), json!(json_rows));
            println!("{}", serde_json::to_string_pretty(&Value::Object(out))?);
        }
    }
    Ok(true)
}

fn print_table(header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<String>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    println!("{}", line(header.iter().map(|h| h.to_string()).collect()));
    for row in rows {
        println!("{}", line(row.clone()));
    }
}

// ---------------------------------------------------------------- search

fn cmd_search(cli: &Cli, args: &SearchArgs) -> Result<bool> {
    let mode = match args.mode {
        ModeArg::Exact => SearchMode::Exact,
        ModeArg::Stochastic => SearchMode::Stochastic,
    };
    if matches!(mode, SearchMode::Stochastic) {
        check_cubic_guard(cli, args.n, "stochastic search (greedy saturation)")?;
    }
    let result = constructions::search_minimum(args.n, args.s, mode, args.budget, args.seed)?;
    let main_ceil = if args.s <= args.n + 1 {
        Some(bounds::main_bound(args.n, args.s)?.ceil().to_integer().to_string())
    } else {
        None
    };
    let conjecture = bounds::conjecture_bound(args.n, args.s);
    let compact = io::write_family(&result.witness, FamilyFormat::Compact);
    let mut lines = compact.lines();
    let witness_header = lines.next().unwrap_or_default().to_string();
    let witness_hex = lines.next().unwrap_or_default().to_string();
    let mut out = report_base(cli, "search");
    out.insert("n".into(), json!(args.n));
    out.insert("s".into(), json!(args.s));
    out.insert(
        "mode".into(),
        json!(match mode {
            SearchMode::Exact => "exact",
            SearchMode::Stochastic => "stochastic",
        }),
    );
    out.insert("minimum_size".into(), json!(result.minimum_size));
    out.insert("explored".into(), json!(result.explored));
    out.insert(
        "witness".into(),
        json!({"header": witness_header, "bitmap": witness_hex}),
    );
    out.insert("thm_main_ceil".into(), json!(main_ceil));
    out.insert("conjecture".into(), json!(rational_string(&conjecture)));
    out.insert(
        "matches_conjecture".into(),
        json!(
            num::rational::BigRational::from_integer(num::BigInt::from(result.minimum_size))
                == conjecture
        ),
    );
    println!("{}", serde_json::to_string_pretty(&Value::Object(out))?);
    if let Some(path) = &args.out {
        io::write_family_file(path, &result.witness, args.format.into())?;
        eprintln!("witness written to {}", path.display());
    }
    Ok(true)
}

// ---------------------------------------------------------------- influence

fn cmd_influence(cli: &Cli, args: &InfluenceArgs) -> Result<bool> {
    let f = read_family(cli, &args.file)?;
    let log_base: LogBase = args.log.into();
    let report = influence::influence_report(&f, log_base)?;
    let dense = 2 * f.len() > f.mask_count();
    let kkl = if dense {
        None
    } else {
        Some(influence::check_kkl(&f, log_base)?)
    };
    let pass = match (&kkl, log_base) {
        (Some(v), LogBase::Natural) => v.holds_sumsq && v.holds_max,
        _ => true,
    };
    let mut out = report_base(cli, "influence");
    out.insert("file".into(), json!(args.file.display().to_string()));
    out.insert("n".into(), json!(report.n));
    out.insert("size".into(), json!(f.len()));
    out.insert("p".into(), json!(rational_string(&report.p)));
    out.insert(
        "influences".into(),
        json!(report.influences.iter().map(rational_string).collect::<Vec<_>>()),
    );
    out.insert("boundary_counts".into(), json!(report.boundary_counts));
    out.insert("sum_sq".into(), json!(rational_string(&report.sum_sq)));
    out.insert("sum_sq_approx".into(), json!(rational_to_f64(&report.sum_sq)));
    out.insert("kkl_rhs".into(), json!(report.kkl_rhs));
    out.insert(
        "max_influence".into(),
        json!(rational_string(&report.max_influence)),
    );
    out.insert("best_coordinate".into(), json!(report.best_coordinate));
    out.insert("log_base".into(), json!(log_base.label()));
    out.insert(
        "kkl".into(),
        match &kkl {
            None => json!({"applicable": false, "reason": "density above 1/2"}),
            Some(v) => json!({
                "applicable": true,
                "holds_sumsq": v.holds_sumsq,
                "holds_max": v.holds_max,
                "asserted": matches!(log_base, LogBase::Natural),
            }),
        },
    );
    out.insert("pass".into(), json!(pass));
    match args.format {
        ReportFormat::Json => println!("{}", serde_json::to_string_pretty(&Value::Object(out))?),
        ReportFormat::Table => {
            println!(
                "influence report: n={} size={} p={}",
                report.n,
                f.len(),
                rational_string(&report.p)
            );
            for (i, inf) in report.influences.iter().enumerate() {
                println!("  I_{} = {} ({} boundary pairs)", i + 1, rational_string(inf), report.boundary_counts[i]);
            }
            println!(
                "  sum of squares {} (~{:.6}) vs p^2 log^2 n / 5n = {:.6}",
                rational_string(&report.sum_sq),
                rational_to_f64(&report.sum_sq),
                report.kkl_rhs
            );
            println!(
                "  max influence {} at coordinate {}",
                rational_string(&report.max_influence),
                report.best_coordinate
            );
            match &kkl {
                None => println!("  kkl: not applicable (density above 1/2)"),
                Some(v) => println!(
                    "  kkl ({} log): sum-of-squares {}, max-influence {}",
                    log_base.label(),
                    verdict_mark(v.holds_sumsq),
                    verdict_mark(v.holds_max)
                ),
            }
        }
    }
    Ok(pass)
}

// ---------------------------------------------------------------- ranklab

fn cmd_ranklab(cli: &Cli, args: &RanklabArgs) -> Result<bool> {
    let f = read_family(cli, &args.file)?;
    let policy = match args.g0 {
        G0Arg::Auto => UpsetPolicy::Auto,
        G0Arg::None => UpsetPolicy::None,
    };
    let report = ranklab::rank_report(&f, args.s, policy)?;
    let refinement_ok = !matches!(report.verdicts.upset_refinement, RefinementVerdict::Fails);
    let pass = report.verdicts.cross_level_orthogonal
        && report.verdicts.rank_at_least_union_count
        && report.verdicts.rank_sum_within_dimension
        && refinement_ok;
    let mut out = report_base(cli, "ranklab");
    out.insert("file".into(), json!(args.file.display().to_string()));
    out.insert("n".into(), json!(report.n));
    out.insert("s".into(), json!(report.s));
    out.insert("union_count".into(), json!(report.union_count));
    out.insert(
        "per_level".into(),
        json!(report
            .per_level
            .iter()
            .map(|l| json!({"k": l.k, "vectors": l.num_vectors, "rank": l.rank}))
            .collect::<Vec<_>>()),
    );
    out.insert("total_rank_sum".into(), json!(report.total_rank_sum));
    out.insert("upset_size".into(), json!(report.upset_size));
    out.insert(
        "verdicts".into(),
        json!({
            "cross_level_orthogonal": report.verdicts.cross_level_orthogonal,
            "rank_at_least_union_count": report.verdicts.rank_at_least_union_count,
            "rank_sum_within_dimension": report.verdicts.rank_sum_within_dimension,
            "upset_refinement": match &report.verdicts.upset_refinement {
                RefinementVerdict::Holds => json!("holds"),
                RefinementVerdict::Fails => json!("fails"),
                RefinementVerdict::NotApplicable(r) => json!({"not_applicable": r}),
            },
        }),
    );
    out.insert("pass".into(), json!(pass));
    match args.format {
        ReportFormat::Json => println!("{}", serde_json::to_string_pretty(&Value::Object(out))?),
        ReportFormat::Table => {
            println!(
                "rank report: n={} s={} unions={}",
                report.n, report.s, report.union_count
            );
            for l in &report.per_level {
                println!("  level {}: {} vectors, rank {}", l.k, l.num_vectors, l.rank);
            }
            println!(
                "  rank sum {} <= 2^n = {} -> {}",
                report.total_rank_sum,
                1u64 << report.n,
                verdict_mark(report.verdicts.rank_sum_within_dimension)
            );
            println!(
                "  cross-level orthogonality: {}",
                verdict_mark(report.verdicts.cross_level_orthogonal)
            );
            println!(
                "  rank >= union count at every level: {}",
                verdict_mark(report.verdicts.rank_at_least_union_count)
            );
            match &report.verdicts.upset_refinement {
                RefinementVerdict::Holds => println!(
                    "  upset refinement (upset size {}): pass",
                    report.upset_size.unwrap_or(0)
                ),
                RefinementVerdict::Fails => println!("  upset refinement: FAIL"),
                RefinementVerdict::NotApplicable(r) => {
                    println!("  upset refinement: not applicable ({r})")
                }
            }
        }
    }
    Ok(pass)
}
