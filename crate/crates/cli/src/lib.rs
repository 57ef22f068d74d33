//! Command-line front end for the `divisor-delta` library.

pub mod emit;
pub mod suites;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divisor_delta::survey::{decade_grid, delta_histogram, DEFAULT_BLOCK_SIZE};
use divisor_delta::{
    best_window, classify, exponent_fit, gauss_tail, log_weighted_sum, recurse_check, survey, t_q_sum, Error,
    Factorization, FitModel, Moments, Params, SurveyOptions, SurveyRecord, MAX_Q,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use emit::{emit, DeltaRow, Format, HistogramRow, LevelRow, MomentRow, RecurseRow, Record, Row, SumRow};
use suites::{Context, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "delta-cli", version, about = "Exact computations with the Delta function of divisors")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to available parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Δ(n) for one n (prints the value; `--format` gives a record).
    Delta {
        #[arg(long)]
        n: u64,
    },
    /// Moments M_1..M_q of the profile of n.
    Moments {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 6)]
        q: u32,
    },
    /// Seeded invariant checks.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
    /// Exact partial sums of Δ(n).
    Survey(SurveyArgs),
    /// Level-set quantities.
    Levelsets(LevelArgs),
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    #[arg(long)]
    pub x: u64,
    #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
    pub block_size: u64,
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Also write the records as CSV to this path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Report every power of ten below x as well as x.
    #[arg(long)]
    pub decades: bool,
    /// Append growth fits (needs at least three x values) to this CSV path.
    #[arg(long)]
    pub fit: Option<PathBuf>,
    /// Write the Δ histogram (factor-2 bins) to this CSV path.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    #[arg(long, hide = true)]
    pub stop_after_blocks: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LevelMode {
    Classify,
    Tail,
    Tq,
    Recurse,
    Weighted,
}

#[derive(Debug, Args)]
pub struct LevelArgs {
    #[arg(long, value_enum, default_value_t = LevelMode::Classify)]
    pub mode: LevelMode,
    #[arg(long = "A", default_value_t = 10.0)]
    pub a: f64,
    #[arg(long, default_value_t = divisor_delta::levelset::DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long = "C0", default_value_t = divisor_delta::levelset::DEFAULT_C0)]
    pub c0: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub x: f64,
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    #[arg(long, default_value_t = 1_000_000)]
    pub enum_cap: u64,
    /// Integer to classify (mode classify).
    #[arg(long)]
    pub n: Option<u64>,
}

/// Failure of a command, mapped onto an exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    /// Carries the rendered report alongside the summary message.
    Verification { report: String, message: String },
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Verification { .. } => EXIT_VERIFY_FAILED,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Verification { message: m, .. } => m,
        }
    }
}

fn usage(flag: &str, err: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("--{flag}: {err}"))
}

fn lib_err(err: Error) -> Failure {
    Failure::Usage(err.to_string())
}

fn io_err(path: &std::path::Path, err: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {err}", path.display()))
}

fn write_file(path: &std::path::Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn table(records: &[Record], format: Format, header: &'static [&'static str]) -> Result<String, Failure> {
    emit(records, format, Some(header)).map_err(|e| Failure::Usage(e.to_string()))
}

fn factor(n: u64) -> Result<Factorization, Failure> {
    if n == 0 {
        return Err(usage("n", "must be at least 1"));
    }
    if n == 1 {
        return Factorization::from_prime_powers(vec![]).map_err(lib_err);
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        let mut k = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            k += 1;
        }
        if k > 0 {
            factors.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Factorization::from_prime_powers(factors).map_err(lib_err)
}

fn workers(global: &GlobalOpts) -> Result<usize, Failure> {
    match global.workers {
        Some(0) => Err(usage("workers", "must be at least 1")),
        Some(w) => Ok(w),
        None => Ok(divisor_delta::survey::default_workers()),
    }
}

/// Executes `cli`, returning the main output text.
pub fn run(cli: &Cli) -> Result<String, Failure> {
    let g = &cli.global;
    let format = g.format.unwrap_or(Format::Csv);
    match &cli.command {
        Command::Delta { n } => {
            let f = factor(*n)?;
            let divs = f.divisors();
            let w = best_window(divs.as_slice());
            match g.format {
                None => Ok(format!("{}\n", w.count)),
                Some(fmt) => {
                    let row = DeltaRow { n: *n, tau: f.tau(), delta: w.count, anchor_divisor: w.anchor_divisor };
                    table(&[Record::Delta(row)], fmt, DeltaRow::COLUMNS)
                }
            }
        }
        Command::Moments { n, q } => {
            if *q == 0 || *q > MAX_Q {
                return Err(usage("q", format!("must be in [1, {MAX_Q}], got {q}")));
            }
            let divs = factor(*n)?.divisors();
            let table_ = Moments::new(&divs, *q).map_err(lib_err)?;
            let means = table_.power_means();
            let support_means = table_.normalized_power_means();
            let rows: Vec<Record> = (1..=*q)
                .map(|k| {
                    let m = table_.get(k).expect("order within table");
                    Record::Moment(MomentRow {
                        n: *n,
                        q: k,
                        moment: m,
                        power_mean: means[k as usize - 1],
                        normalized: m / table_.tau as f64,
                        support_power_mean: support_means[k as usize - 1],
                    })
                })
                .collect();
            table(&rows, format, MomentRow::COLUMNS)
        }
        Command::Verify { suite, samples } => {
            let ctx = Context::new().map_err(lib_err)?;
            let chosen: Vec<Suite> = if *suite == Suite::All { Suite::EACH.to_vec() } else { vec![*suite] };
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            let mut rows = Vec::new();
            for s in chosen {
                rows.push(suites::run_suite(&ctx, s, *samples, &mut rng).map_err(lib_err)?);
            }
            let failed: Vec<String> = rows.iter().filter(|r| !r.passed).map(|r| r.suite.clone()).collect();
            let text = match g.format {
                None => rows
                    .iter()
                    .map(|r| {
                        let status = if r.passed { "PASS" } else { "FAIL" };
                        format!("{status} {} samples={} failures={} max_residual={:.6e}\n", r.suite, r.samples, r.failures, r.worst)
                    })
                    .collect(),
                Some(fmt) => {
                    let recs: Vec<Record> = rows.into_iter().map(Record::Check).collect();
                    table(&recs, fmt, emit::CheckRow::COLUMNS)?
                }
            };
            if failed.is_empty() {
                Ok(text)
            } else {
                Err(Failure::Verification { report: text, message: format!("verification failed: {}", failed.join(", ")) })
            }
        }
        Command::Survey(args) => run_survey(args, g, format),
        Command::Levelsets(args) => run_levelsets(args, format),
    }
}

fn run_survey(args: &SurveyArgs, g: &GlobalOpts, format: Format) -> Result<String, Failure> {
    if args.x == 0 {
        return Err(usage("x", "must be at least 1"));
    }
    if args.block_size == 0 {
        return Err(usage("block-size", "must be at least 1"));
    }
    let workers = workers(g)?;
    let xs = if args.decades { decade_grid(args.x) } else { vec![args.x] };
    let opts = SurveyOptions {
        block_size: args.block_size,
        workers,
        checkpoint: args.checkpoint.clone(),
        stop_after_blocks: args.stop_after_blocks,
    };
    let records = survey(&xs, &opts).map_err(lib_err)?;
    let recs: Vec<Record> = records.iter().cloned().map(Record::Survey).collect();
    if let Some(path) = &args.csv {
        write_file(path, &table(&recs, Format::Csv, SurveyRecord::COLUMNS)?)?;
    }
    if let Some(path) = &args.fit {
        let mut fits = Vec::new();
        for model in [FitModel::PowLog, FitModel::PowLoglog] {
            fits.push(Record::Fit(exponent_fit(&records, model).map_err(|e| usage("fit", e))?));
        }
        write_file(path, &table(&fits, Format::Csv, divisor_delta::FitResult::COLUMNS)?)?;
    }
    if let Some(path) = &args.histogram {
        let h = delta_histogram(args.x, args.block_size, workers).map_err(lib_err)?;
        let rows: Vec<Record> = h
            .bins
            .iter()
            .enumerate()
            .map(|(k, &count)| Record::Histogram(HistogramRow { x: h.x, lo: 1 << k, hi: 1 << (k + 1), count }))
            .collect();
        write_file(path, &table(&rows, Format::Csv, HistogramRow::COLUMNS)?)?;
    }
    table(&recs, format, SurveyRecord::COLUMNS)
}

fn run_levelsets(args: &LevelArgs, format: Format) -> Result<String, Failure> {
    let params = Params::new(args.a, args.delta, args.c0, args.x).map_err(|e| match &e {
        Error::OutOfRange { what, .. } => usage(what, &e),
        _ => lib_err(e),
    })?;
    if args.q == 0 || args.q > MAX_Q {
        return Err(usage("q", format!("must be in [1, {MAX_Q}], got {}", args.q)));
    }
    if args.enum_cap == 0 {
        return Err(usage("enum-cap", "must be at least 1"));
    }
    let sum_row = |quantity: &str, q: u32, s: divisor_delta::Truncated| {
        Record::Sum(SumRow {
            quantity: quantity.into(),
            a: args.a,
            x: args.x,
            q,
            value: s.value,
            bound: s.bound,
            ratio: s.ratio(),
            terms: s.terms,
            enum_cap: s.enum_cap,
        })
    };
    match args.mode {
        LevelMode::Classify => {
            let Some(n) = args.n else { return Err(usage("n", "required in classify mode")) };
            let f = factor(n)?;
            let c = classify(&f, &params, args.q).map_err(|e| usage("n", e))?;
            let row = LevelRow { n, in_sa: c.in_sa, max_q_in_sqa: c.max_q_in_sqa, witness_y: c.witness_y, witness_q: c.witness_q };
            table(&[Record::Level(row)], format, LevelRow::COLUMNS)
        }
        LevelMode::Tail => {
            let s = gauss_tail(&params, args.enum_cap).map_err(lib_err)?;
            table(&[sum_row("gauss_tail", 0, s)], format, SumRow::COLUMNS)
        }
        LevelMode::Tq => {
            if args.q < 2 {
                return Err(usage("q", "must be at least 2 in tq mode"));
            }
            let rows = (2..=args.q)
                .map(|q| t_q_sum(q, &params, args.enum_cap).map(|s| sum_row("t_q", q, s)))
                .collect::<Result<Vec<_>, _>>()
                .map_err(lib_err)?;
            table(&rows, format, SumRow::COLUMNS)
        }
        LevelMode::Recurse => {
            let r = recurse_check(args.q, &params).map_err(|e| usage("q", e))?;
            let row = RecurseRow { a: args.a, c0: args.c0, q_max: args.q, r2_max: r.r2_max(), r3_max: r.r3_max(), lower_max: r.lower_max() };
            table(&[Record::Recurse(row)], format, RecurseRow::COLUMNS)
        }
        LevelMode::Weighted => {
            let s = log_weighted_sum(args.x, args.enum_cap).map_err(lib_err)?;
            table(&[sum_row("log_weighted", 0, s)], format, SumRow::COLUMNS)
        }
    }
}

/// Parses `argv`, runs, writes output, and returns the process exit code.
pub fn main_with(argv: impl IntoIterator<Item = String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(stderr, "{}", e.render()) } else { write!(stdout, "{}", e.render()) };
            return code;
        }
    };
    let result = match run(&cli) {
        Err(Failure::Verification { report, message }) => {
            let _ = writeln!(stderr, "error: {message}");
            Err((report, EXIT_VERIFY_FAILED))
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            return f.exit_code();
        }
        Ok(text) => Ok(text),
    };
    let (text, code) = match result {
        Ok(t) => (t, EXIT_OK),
        Err(pair) => pair,
    };
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => code,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
    }
}
