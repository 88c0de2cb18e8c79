use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;

use pinn_core::arith::{factorize, multiplicative_order_factored, DEFAULT_FACTOR_BUDGET};
use pinn_core::families::{catalog, instantiate, verify_family, FamilyTemplate, MemberVerdict};
use pinn_core::perm::DEFAULT_ORBIT_BUDGET;
use pinn_core::repdigit::{
    repdigit_niven_check, sweep_exact_solutions, verify_conjecture_grid, zero_insertion_probe,
    ConjectureConstraints, GridBounds, GridReport, RepdigitCheck, SweepEntry, DEFAULT_BIT_CAP,
};
use pinn_core::search::{
    bfile_lines, census, pinn_values_up_to, report_csv, search_stage1, DEFAULT_CENSUS_LIMIT,
};
use pinn_core::{
    search, Digit, DigitString, PinnRecord, RepBlockForm, Refutation, SearchConfig, SearchReport,
};

const THREADS_ENV: &str = "PINN_THREADS";

#[derive(Parser)]
#[command(name = "pinn", version, about = "Search and verify permutation-invariant Niven numbers")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads (default: PINN_THREADS, else all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest orbit checked by full enumeration
    #[arg(long, global = true, default_value_t = DEFAULT_ORBIT_BUDGET)]
    budget: u64,
    /// Print elapsed times to stderr (and per-tuple times in grid reports)
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Bfile,
}

#[derive(Subcommand)]
enum Command {
    /// PINN verdict for a number given as digits or rep-blocks, e.g. 1_(26)01
    Check { number: String },
    /// All PINN digit multisets of length k
    Search(SearchArgs),
    /// Instantiate the ten infinite families at length k
    Families {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        verify: bool,
    },
    /// The listed PINN sets for k = 1..9
    Catalog {
        #[arg(long)]
        k: usize,
    },
    /// Repdigit congruence 10^k = 1 for k = 3^n * prod m_i^e_i
    Repdigit(RepdigitArgs),
    /// Multiplicative order of 10 modulo m
    Order {
        #[arg(long)]
        m: BigUint,
    },
    /// Count Niven numbers and PINNs up to a bound
    Census {
        #[arg(long)]
        max: u64,
    },
    /// Insert zeros into a number and reduce by the original digit sum
    ProbeZeroInsertion {
        number: String,
        /// Digits left to the right of the inserted zeros
        position: usize,
        count: usize,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    k: usize,
    /// Zero-free multisets only
    #[arg(long)]
    no_zeros: bool,
    #[arg(long)]
    exclude_repdigits: bool,
    /// Cross-check stage 2 against every zero-containing multiset
    #[arg(long)]
    exhaustive_zero_scan: bool,
}

#[derive(Args)]
struct RepdigitArgs {
    /// Repeated digit
    #[arg(long, default_value_t = 1)]
    a: u8,
    /// Power of 3
    #[arg(long, default_value_t = 0)]
    n: u32,
    #[arg(long, default_value_t = 0)]
    alpha: u32,
    #[arg(long, default_value_t = 0)]
    beta: u32,
    #[arg(long, default_value_t = 0)]
    gamma1: u32,
    #[arg(long, default_value_t = 0)]
    gamma2: u32,
    #[arg(long, default_value_t = 0)]
    delta1: u32,
    #[arg(long, default_value_t = 0)]
    delta2: u32,
    #[arg(long, default_value_t = 0)]
    delta3: u32,
    #[arg(long, default_value_t = 0)]
    delta4: u32,
    #[arg(long, default_value_t = 0)]
    delta5: u32,
    /// Verify every tuple with n <= --n and exponents <= --max-exp
    #[arg(long)]
    grid: bool,
    #[arg(long, default_value_t = 1)]
    max_exp: u32,
    #[arg(long, default_value_t = DEFAULT_BIT_CAP)]
    bit_cap: u64,
    /// Also compute ord(10) modulo 9k for grid tuples
    #[arg(long)]
    orders: bool,
    /// List every k up to this bound with 10^k = 1 (mod 9k)
    #[arg(long, conflicts_with = "grid")]
    sweep: Option<u64>,
}

/// Output plus exit status.
struct Outcome {
    stdout: String,
    verified: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            verified: true,
        }
    }
}

enum Failure {
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn unsupported(format: Format, what: &str) -> Failure {
    let name = match format {
        Format::Text => "text",
        Format::Json => "json",
        Format::Csv => "csv",
        Format::Bfile => "bfile",
    };
    Failure::Usage(format!("--format {name} is not available for {what}"))
}

fn parse_number(input: &str) -> Result<DigitString, Failure> {
    let s = DigitString::parse(input)?;
    Ok(s.normalize()?)
}

#[derive(Serialize)]
struct CheckReport {
    input: String,
    pinn: bool,
    digit_sum: u64,
    #[serde(serialize_with = "as_decimal")]
    orbit_size: BigUint,
    #[serde(skip_serializing_if = "Option::is_none")]
    record: Option<PinnRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refutation: Option<Refutation>,
}

fn as_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn check(cli: &Cli, input: &str) -> Result<Outcome, Failure> {
    let number = parse_number(input)?;
    let multiset = number.multiset()?;
    let verdict = PinnRecord::certify(&multiset, cli.budget);
    let report = CheckReport {
        input: number.compress().to_string(),
        pinn: verdict.is_ok(),
        digit_sum: multiset.digit_sum(),
        orbit_size: multiset.orbit_size(),
        refutation: verdict.clone().err(),
        record: verdict.ok(),
    };
    let stdout = match cli.format {
        Format::Json => json(&report),
        Format::Text => {
            let mut out = String::new();
            let verdict = if report.pinn { "PINN" } else { "not PINN" };
            writeln!(out, "{}: {verdict}", report.input).unwrap();
            writeln!(out, "digit sum: {}", report.digit_sum).unwrap();
            writeln!(out, "orbit size: {}", report.orbit_size).unwrap();
            match (&report.record, &report.refutation) {
                (Some(r), _) => match &r.proof {
                    pinn_core::PinnProof::Exhaustive(p) => {
                        writeln!(out, "proof: all {} arrangements divisible", p.checked).unwrap()
                    }
                    pinn_core::PinnProof::Criterion(p) => writeln!(
                        out,
                        "proof: transposition criterion, {} digit pairs, {} position gaps, base residue {}",
                        p.digit_pairs_checked.len(),
                        p.position_gaps_checked.len(),
                        p.base_residue
                    )
                    .unwrap(),
                },
                (None, Some(Refutation::Arrangement(w))) => writeln!(
                    out,
                    "witness: {} mod {} = {}",
                    w.arrangement, w.digit_sum, w.residue
                )
                .unwrap(),
                (None, Some(Refutation::BaseResidue { digit_sum, residue })) => writeln!(
                    out,
                    "witness: {} mod {digit_sum} = {residue}",
                    multiset.canonical().compress()
                )
                .unwrap(),
                (None, Some(Refutation::Swap(f))) => writeln!(
                    out,
                    "witness: swapping digits {} and {} at positions {} and {} changes the residue by {} mod {}",
                    f.high,
                    f.low,
                    f.offset,
                    f.offset + f.gap,
                    f.residue,
                    report.digit_sum
                )
                .unwrap(),
                (None, None) => {}
            }
            out
        }
        other => return Err(unsupported(other, "check")),
    };
    Ok(Outcome {
        stdout,
        verified: report.pinn,
    })
}

fn search_text(report: &SearchReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "k = {}: {} PINN multisets ({} zero-free, {} with zeros), {} multisets scanned, {} confirmed by enumeration",
        report.k,
        report.records.len(),
        report.stage1_count,
        report.stage2_count,
        report.multisets_scanned,
        report.bruteforce_confirmed
    )
    .unwrap();
    for r in &report.records {
        let rep = DigitString::parse(&r.canonical).expect("canonical digits").compress();
        writeln!(out, "{rep}  sum {}  orbit {}", r.digit_sum, r.orbit_size).unwrap();
    }
    if let Some(scan) = &report.zero_scan {
        writeln!(
            out,
            "zero scan: {} multisets, {} PINNs, {} missed by stage 2",
            scan.scanned,
            scan.found,
            scan.missed_by_stage2.len()
        )
        .unwrap();
    }
    out
}

fn run_search(cli: &Cli, args: &SearchArgs) -> Result<Outcome, Failure> {
    let mut cfg = if args.no_zeros {
        SearchConfig::stage1(args.k)
    } else {
        SearchConfig::new(args.k)
    };
    cfg.exclude_repdigits = args.exclude_repdigits;
    cfg.orbit_budget = cli.budget;
    cfg.exhaustive_zero_scan = args.exhaustive_zero_scan;
    if args.no_zeros && args.exhaustive_zero_scan {
        return Err(Failure::Usage("--exhaustive-zero-scan needs zeros allowed".into()));
    }
    let report = if args.no_zeros {
        search_stage1(&cfg)?
    } else {
        search(&cfg)?
    };
    if cli.timings {
        eprintln!("search k = {}: {:.3?}", args.k, report.elapsed);
    }
    let verified = report
        .zero_scan
        .as_ref()
        .is_none_or(|s| s.missed_by_stage2.is_empty());
    let stdout = match cli.format {
        Format::Text => search_text(&report),
        Format::Json => json(&report),
        Format::Csv => report_csv(&report),
        Format::Bfile => bfile_lines(&report.values()),
    };
    Ok(Outcome { stdout, verified })
}

#[derive(Serialize)]
struct FamilyReport {
    family: String,
    k: usize,
    members: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdicts: Option<Vec<MemberVerdict>>,
}

fn families(cli: &Cli, k: usize, verify: bool) -> Result<Outcome, Failure> {
    let mut reports = Vec::new();
    for t in FamilyTemplate::all() {
        if k < t.min_k {
            continue;
        }
        let inst = instantiate(&t, k)?;
        reports.push(FamilyReport {
            family: t.id.to_string(),
            k,
            members: inst.patterns.iter().map(|p| p.to_string()).collect(),
            verdicts: verify.then(|| verify_family(&inst, cli.budget)),
        });
    }
    if reports.is_empty() {
        return Err(Failure::Usage(format!("no family is defined at k = {k} (need k >= 2)")));
    }
    let verified = reports
        .iter()
        .flat_map(|r| r.verdicts.iter().flatten())
        .all(|v| v.verdict && v.bruteforce != Some(false));
    let stdout = match cli.format {
        Format::Json => json(&reports),
        Format::Text => {
            let mut out = String::new();
            for r in &reports {
                writeln!(out, "{} (k = {}): {}", r.family, r.k, r.members.join(" ")).unwrap();
                for v in r.verdicts.iter().flatten() {
                    let method = match v.bruteforce {
                        Some(true) => "criterion and enumeration",
                        Some(false) => "enumeration FAILED",
                        None => "criterion",
                    };
                    let verdict = if v.verdict { "PINN" } else { "not PINN" };
                    writeln!(out, "  {}  sum {}  {verdict} ({method})", v.pattern, v.digit_sum)
                        .unwrap();
                }
            }
            out
        }
        other => return Err(unsupported(other, "families")),
    };
    Ok(Outcome { stdout, verified })
}

#[derive(Serialize)]
struct ListedSet {
    name: String,
    members: Vec<String>,
}

fn run_catalog(cli: &Cli, k: usize) -> Result<Outcome, Failure> {
    let sets: Vec<ListedSet> = catalog(k)?
        .into_iter()
        .map(|s| ListedSet {
            name: s.source.to_string(),
            members: s.patterns.iter().map(|p| p.to_string()).collect(),
        })
        .collect();
    let stdout = match cli.format {
        Format::Json => json(&sets),
        Format::Text => sets
            .iter()
            .map(|s| format!("{} ({}): {}\n", s.name, s.members.len(), s.members.join(" ")))
            .collect(),
        other => return Err(unsupported(other, "catalog")),
    };
    Ok(Outcome::ok(stdout))
}

#[derive(Serialize)]
struct TupleReport {
    a: u8,
    tuple: ConjectureConstraints,
    k: String,
    k_bits: u64,
    ladder: bool,
    #[serde(flatten)]
    check: RepdigitCheck,
}

fn repdigit(cli: &Cli, args: &RepdigitArgs) -> Result<Outcome, Failure> {
    if let Some(max_k) = args.sweep {
        return sweep(cli, max_k);
    }
    let exps = [
        args.alpha, args.beta, args.gamma1, args.gamma2, args.delta1, args.delta2, args.delta3,
        args.delta4, args.delta5,
    ];
    if args.grid {
        let mut bounds = GridBounds::uniform(args.n, args.max_exp);
        // explicit exponents raise individual bounds
        for (b, e) in bounds.max_exp.iter_mut().zip(exps) {
            *b = (*b).max(e);
        }
        let mut report = verify_conjecture_grid(&bounds, args.bit_cap, args.orders);
        if !cli.timings {
            report.strip_timings();
        }
        return grid_output(cli, &report);
    }
    if args.a == 0 {
        return Err(Failure::Usage("--a must be 1..9".into()));
    }
    let digit = Digit::new(args.a)?;
    let tuple = ConjectureConstraints::new(args.n, exps);
    let k = tuple.factored();
    let check = repdigit_niven_check(digit, &k);
    let report = TupleReport {
        a: args.a,
        tuple,
        k: k.to_string(),
        k_bits: k.value().bits(),
        ladder: tuple.satisfies_ladder(),
        check,
    };
    let stdout = match cli.format {
        Format::Json => json(&report),
        Format::Text => format!(
            "k = {} ({} bits), {tuple}\nladder satisfied: {}\nexact  10^k = 1 mod 9k: {}\nstrict 10^k = 1 mod 9ka (a = {}): {}\n",
            report.k, report.k_bits, report.ladder, check.exact, args.a, check.strict
        ),
        other => return Err(unsupported(other, "repdigit")),
    };
    Ok(Outcome {
        stdout,
        verified: report.ladder == check.exact,
    })
}

fn grid_output(cli: &Cli, report: &GridReport) -> Result<Outcome, Failure> {
    let stdout = match cli.format {
        Format::Json => json(report),
        Format::Text => {
            let mut out = String::new();
            writeln!(
                out,
                "{} tuples: {} passed, {} failed, {} over the {}-bit cap",
                report.entries.len(),
                report.passed,
                report.failed,
                report.skipped,
                report.bit_cap
            )
            .unwrap();
            for e in report.failures() {
                writeln!(out, "FAILED {:?} {}: exact = {}", e.kind, e.tuple, e.exact).unwrap();
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("tuple,kind,k_bits,exact,strict_digits,order_divides_k,pass\n");
            for e in &report.entries {
                let strict: Vec<String> = e.strict_digits.iter().map(|d| d.to_string()).collect();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    e.tuple,
                    match e.kind {
                        pinn_core::repdigit::TupleKind::Admissible => "admissible",
                        pinn_core::repdigit::TupleKind::Violation => "violation",
                    },
                    e.k_bits,
                    e.exact,
                    strict.join(" "),
                    e.order_divides_k.map_or(String::new(), |b| b.to_string()),
                    e.pass
                )
                .unwrap();
            }
            out
        }
        other => return Err(unsupported(other, "repdigit --grid")),
    };
    Ok(Outcome {
        stdout,
        verified: report.all_pass(),
    })
}

fn sweep(cli: &Cli, max_k: u64) -> Result<Outcome, Failure> {
    let entries: Vec<SweepEntry> = sweep_exact_solutions(max_k);
    let stdout = match cli.format {
        Format::Json => json(&entries),
        Format::Bfile => bfile_lines(&entries.iter().map(|e| e.k).collect::<Vec<_>>()),
        Format::Text => entries
            .iter()
            .map(|e| match &e.tuple {
                Some(t) => format!("{} {t}\n", e.k),
                None => format!("{} outside parameterization\n", e.k),
            })
            .collect(),
        Format::Csv => return Err(unsupported(Format::Csv, "repdigit --sweep")),
    };
    Ok(Outcome::ok(stdout))
}

#[derive(Serialize)]
struct OrderReport {
    m: String,
    factorization: Vec<(String, u32)>,
    order: String,
}

fn order(cli: &Cli, m: &BigUint) -> Result<Outcome, Failure> {
    let factors = factorize(m, DEFAULT_FACTOR_BUDGET)?;
    let ord = multiplicative_order_factored(m, &factors, DEFAULT_FACTOR_BUDGET)?;
    let report = OrderReport {
        m: m.to_string(),
        factorization: factors.iter().map(|(p, e)| (p.to_string(), *e)).collect(),
        order: ord.to_string(),
    };
    let stdout = match cli.format {
        Format::Json => json(&report),
        Format::Text => {
            let f: Vec<String> = report
                .factorization
                .iter()
                .map(|(p, e)| if *e == 1 { p.clone() } else { format!("{p}^{e}") })
                .collect();
            let f = if f.is_empty() { "1".to_string() } else { f.join(" * ") };
            format!("m = {} = {f}\nord_m(10) = {}\n", report.m, report.order)
        }
        other => return Err(unsupported(other, "order")),
    };
    Ok(Outcome::ok(stdout))
}

fn run_census(cli: &Cli, max: u64) -> Result<Outcome, Failure> {
    if cli.format == Format::Bfile {
        let values = pinn_values_up_to(max, DEFAULT_CENSUS_LIMIT)?;
        return Ok(Outcome::ok(bfile_lines(&values)));
    }
    let report = census(max, DEFAULT_CENSUS_LIMIT)?;
    let stdout = match cli.format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut out = String::from("digit_sum,pinn_count\n");
            for (s, c) in &report.digit_sum_histogram {
                writeln!(out, "{s},{c}").unwrap();
            }
            out
        }
        _ => {
            let mut out = format!(
                "1..={}: {} Niven numbers, {} PINNs\n",
                report.max_value, report.niven_count, report.pinn_count
            );
            for (s, c) in &report.digit_sum_histogram {
                writeln!(out, "  digit sum {s}: {c}").unwrap();
            }
            writeln!(out, "digit-sum exceptions: {:?}", report.exceptions).unwrap();
            out
        }
    };
    Ok(Outcome {
        stdout,
        verified: report.exceptions.is_empty(),
    })
}

fn probe(cli: &Cli, number: &str, position: usize, count: usize) -> Result<Outcome, Failure> {
    let base: RepBlockForm = number.parse()?;
    let z = zero_insertion_probe(&base, position, count)?;
    let stdout = match cli.format {
        Format::Json => json(&z),
        Format::Text => format!(
            "{} mod {} = {} ({})\n",
            z.modified,
            z.original_digit_sum,
            z.residue,
            if z.is_niven { "Niven" } else { "not Niven" }
        ),
        other => return Err(unsupported(other, "probe-zero-insertion")),
    };
    Ok(Outcome::ok(stdout))
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Check { number } => check(cli, number),
        Command::Search(args) => run_search(cli, args),
        Command::Families { k, verify } => families(cli, *k, *verify),
        Command::Catalog { k } => run_catalog(cli, *k),
        Command::Repdigit(args) => repdigit(cli, args),
        Command::Order { m } => order(cli, m),
        Command::Census { max } => run_census(cli, *max),
        Command::ProbeZeroInsertion {
            number,
            position,
            count,
        } => probe(cli, number, *position, *count),
    }
}

fn thread_count(cli: &Cli) -> Result<Option<usize>, Failure> {
    if let Some(t) = cli.threads {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("{THREADS_ENV}={v:?} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let result = thread_count(&cli).and_then(|threads| {
        if cli.budget == 0 {
            return Err(Failure::Usage("--budget must be at least 1".into()));
        }
        match threads {
            Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
            Some(t) => {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build()?;
                pool.install(|| dispatch(&cli))
            }
            None => dispatch(&cli),
        }
    });
    if cli.timings {
        eprintln!("elapsed: {:.3?}", start.elapsed());
    }
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            if out.verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
