//! `fpindex`: build maps realizing a fixed point index sequence and check them.
//!
//! Exit codes: 0 success, 1 disagreement or failed check, 2 congruence
//! violation, 3 construction failure, 64 usage error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use fpindex::dold::{self, CongruenceVerdict, DoldCoefficients, DoldError, IndexSequence};
use fpindex::index::{self, IndexReport, VerifyError, VerifyOptions, WindingOptions};
use fpindex::map::{self, BuildError, MapDump, SkewProductMap};
use fpindex::orbit;
use fpindex::words::{self, Word};

const EXIT_DISAGREE: u8 = 1;
const EXIT_CONGRUENCE: u8 = 2;
const EXIT_CONSTRUCTION: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "fpindex", version, about = "Realize fixed point index sequences by planar maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the map and verify the index of every iterate.
    Realize(RealizeArgs),
    /// Check the Dold congruences of an index sequence.
    Validate {
        #[arg(long, allow_hyphen_values = true)]
        index: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Recover the coefficients of an index sequence.
    Invert {
        #[arg(long, allow_hyphen_values = true)]
        index: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Thue–Morse prefixes, power-freeness, conjugates and the stream set.
    Words(WordsArgs),
    /// Emit the constructed map as JSON, or rebuild and re-emit a dump.
    MapDump(MapDumpArgs),
    /// Distances from low-period angles to the blown orbits.
    Separation {
        #[arg(long, default_value_t = 3)]
        probe_period: usize,
        #[arg(long, default_value_t = 64)]
        n_max: usize,
        #[arg(long, default_value_t = orbit::SEPARATION_THRESHOLD)]
        threshold: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Iterate quasi-random points and look for orbits that fail to escape.
    Escape {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long, default_value_t = 5.0)]
        band: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Verify random coefficient maps.
    Sweep {
        #[arg(long, default_value_t = 25)]
        cases: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        #[arg(long, default_value_t = 5)]
        max_period: u64,
        #[arg(long, default_value_t = 3)]
        max_abs: i64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
#[command(group(ArgGroup::new("input").required(true).args(["coeffs", "index"])))]
struct InputArgs {
    /// Coefficients as `k:a_k` pairs, e.g. `1:-1,2:3`.
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Index sequence prefix, e.g. `1,-5,1,-5`.
    #[arg(long, allow_hyphen_values = true)]
    index: Option<String>,
}

#[derive(Args)]
struct OutArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RealizeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Largest iterate checked; defaults to 8, or the length of `--index`.
    #[arg(long)]
    max_n: Option<usize>,
    /// Minimum uniform samples on the curve.
    #[arg(long, default_value_t = 0)]
    samples: usize,
    #[arg(long, default_value_t = 20)]
    max_depth: u32,
    /// Include the sampled displacement curves in the report.
    #[arg(long)]
    dump_curve: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum WordCheck {
    CubeFree,
    Circular6,
    Primitive,
    All,
}

#[derive(Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["check", "conjugates", "prefix", "power_free", "dump_a"])))]
struct WordsArgs {
    #[arg(long, value_enum)]
    check: Option<WordCheck>,
    #[arg(long)]
    conjugates: Option<String>,
    /// Print the Thue–Morse prefix of this length.
    #[arg(long)]
    prefix: Option<usize>,
    /// Test this word for `--k`-power-freeness.
    #[arg(long)]
    power_free: Option<String>,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Dump the periodic streams built from the prefixes up to `--n-max`.
    #[arg(long)]
    dump_a: bool,
    #[arg(long, default_value_t = 64)]
    n_max: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["coeffs", "index", "from"])))]
struct MapDumpArgs {
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    index: Option<String>,
    /// Rebuild from an existing dump and check it is reproduced exactly.
    #[arg(long)]
    from: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

/// Failure carrying its exit code.
struct Exit {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Exit {
    fn from(e: E) -> Self {
        Exit {
            code: EXIT_DISAGREE,
            error: e.into(),
        }
    }
}

fn exit_with(code: u8, error: impl Into<anyhow::Error>) -> Exit {
    Exit {
        code,
        error: error.into(),
    }
}

fn dold_exit(e: DoldError) -> Exit {
    match e {
        DoldError::CongruenceViolation { .. } => exit_with(EXIT_CONGRUENCE, e),
        other => exit_with(EXIT_USAGE, other),
    }
}

fn verify_exit(e: VerifyError) -> Exit {
    match e {
        VerifyError::Build(b) => exit_with(EXIT_CONSTRUCTION, b),
        VerifyError::Winding(w) => exit_with(EXIT_DISAGREE, w),
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn emit<T: Serialize>(out: &OutArgs, command: &str, body: T) -> Result<()> {
    let text = serde_json::to_string_pretty(&Envelope { schema: 1, command, body })?;
    write_text(out, &text)
}

fn write_text(out: &OutArgs, text: &str) -> Result<()> {
    match &out.out {
        Some(path) => fs::write(path, format!("{text}\n")).with_context(|| format!("writing {}", path.display())),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

/// Coefficients from either literal form, plus the length of an index prefix.
fn read_input(coeffs: Option<&str>, index: Option<&str>) -> Result<(DoldCoefficients, Option<usize>), Exit> {
    match (coeffs, index) {
        (Some(c), None) => Ok((c.parse().map_err(dold_exit)?, None)),
        (None, Some(i)) => {
            let seq: IndexSequence = i.parse().map_err(dold_exit)?;
            Ok((dold::invert(&seq).map_err(dold_exit)?, Some(seq.len())))
        }
        _ => Err(exit_with(EXIT_USAGE, anyhow::anyhow!("give exactly one of --coeffs or --index"))),
    }
}

fn realize(args: RealizeArgs) -> Result<(), Exit> {
    let (coeffs, len) = read_input(args.input.coeffs.as_deref(), args.input.index.as_deref())?;
    let max_n = args.max_n.or(len).unwrap_or(8);
    if max_n == 0 {
        return Err(exit_with(EXIT_USAGE, anyhow::anyhow!("--max-n must be at least 1")));
    }
    let opts = VerifyOptions {
        winding: WindingOptions {
            initial_samples: args.samples,
            max_depth: args.max_depth,
            ..WindingOptions::default()
        },
        keep_curves: args.dump_curve,
    };
    let report = index::verify_with(&coeffs, max_n, opts).map_err(verify_exit)?;
    emit(&args.out, "realize", &report)?;
    if report.all_agree {
        Ok(())
    } else {
        Err(exit_with(EXIT_DISAGREE, anyhow::anyhow!("index mismatch: {}", mismatches(&report))))
    }
}

fn mismatches(report: &IndexReport) -> String {
    report
        .rows
        .iter()
        .filter(|r| !r.agree)
        .map(|r| format!("n={} numeric={} combinatorial={} target={}", r.n, r.numeric, r.combinatorial, r.target))
        .collect::<Vec<_>>()
        .join("; ")
}

fn validate(index: &str, out: &OutArgs) -> Result<(), Exit> {
    let seq: IndexSequence = index.parse().map_err(dold_exit)?;
    let verdict = dold::check_congruences(&seq);
    #[derive(Serialize)]
    struct Body<'a> {
        index: &'a IndexSequence,
        #[serde(flatten)]
        verdict: CongruenceVerdict,
    }
    emit(out, "validate", Body { index: &seq, verdict })?;
    match verdict {
        CongruenceVerdict::Pass => Ok(()),
        CongruenceVerdict::Fail { n, residue } => Err(exit_with(
            EXIT_CONGRUENCE,
            DoldError::CongruenceViolation { n, residue },
        )),
    }
}

fn invert(index: &str, out: &OutArgs) -> Result<(), Exit> {
    let seq: IndexSequence = index.parse().map_err(dold_exit)?;
    let coeffs = dold::invert(&seq).map_err(dold_exit)?;
    #[derive(Serialize)]
    struct Body<'a> {
        index: &'a IndexSequence,
        coefficients: &'a DoldCoefficients,
        literal: String,
    }
    emit(out, "invert", Body { index: &seq, coefficients: &coeffs, literal: coeffs.to_string() })?;
    Ok(())
}

#[derive(Serialize)]
struct CheckOutcome {
    check: &'static str,
    n_max: usize,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<Counterexample>,
}

#[derive(Serialize)]
struct Counterexample {
    n: usize,
    word: Word,
    position: usize,
    block: usize,
}

fn run_check(name: &'static str, n_max: usize, t: &Word) -> CheckOutcome {
    let prefix = |n: usize| Word::from_bits(t.bits()[..n].to_vec());
    let counterexample = match name {
        "cube-free" => words::shortest_prefix_with_power(t, 3).map(|n| {
            let w = prefix(n);
            let occ = words::find_power(&w, 3).expect("prefix contains the cube");
            Counterexample { n, word: w, position: occ.start, block: occ.block }
        }),
        "circular6" => (1..=n_max).find_map(|n| {
            let w = prefix(n);
            words::find_circular_power(&w, 6).map(|occ| Counterexample { n, word: w, position: occ.start, block: occ.block })
        }),
        _ => (1..=n_max).find_map(|n| {
            let w = prefix(n);
            (!words::is_primitive(&w)).then(|| Counterexample {
                n,
                position: 0,
                block: w.primitive_root_len(),
                word: w,
            })
        }),
    };
    CheckOutcome { check: name, n_max, pass: counterexample.is_none(), counterexample }
}

fn words_cmd(args: WordsArgs) -> Result<(), Exit> {
    let parse_word = |s: &str| s.parse::<Word>().map_err(|e| exit_with(EXIT_USAGE, e));
    if let Some(w) = &args.conjugates {
        let w = parse_word(w)?;
        let list: Vec<String> = words::conjugates(&w).iter().map(Word::to_string).collect();
        write_text(&args.out, &list.join(","))?;
        return Ok(());
    }
    if let Some(n) = args.prefix {
        let w = words::ptm_prefix(n).map_err(|e| exit_with(EXIT_USAGE, e))?;
        write_text(&args.out, &w.to_string())?;
        return Ok(());
    }
    if let Some(w) = &args.power_free {
        if args.k < 2 {
            return Err(exit_with(EXIT_USAGE, anyhow::anyhow!("--k must be at least 2")));
        }
        let w = parse_word(w)?;
        #[derive(Serialize)]
        struct Body {
            word: Word,
            k: usize,
            power_free: bool,
            circular_power_free: bool,
            #[serde(skip_serializing_if = "Option::is_none")]
            occurrence: Option<words::PowerOccurrence>,
        }
        let occurrence = words::find_power(&w, args.k);
        let body = Body {
            power_free: occurrence.is_none(),
            circular_power_free: words::circular_k_power_free(&w, args.k),
            occurrence,
            k: args.k,
            word: w,
        };
        let free = body.power_free;
        emit(&args.out, "words", body)?;
        return if free { Ok(()) } else { Err(exit_with(EXIT_DISAGREE, anyhow::anyhow!("word is not {}-power-free", args.k))) };
    }
    if args.n_max == 0 {
        return Err(exit_with(EXIT_USAGE, anyhow::anyhow!("--n-max must be at least 1")));
    }
    if args.dump_a {
        let groups = words::build_a(args.n_max).map_err(|e| exit_with(EXIT_CONSTRUCTION, e))?;
        emit(&args.out, "words", serde_json::json!({ "n_max": args.n_max, "groups": groups }))?;
        return Ok(());
    }
    let t = words::ptm_prefix(args.n_max).map_err(|e| exit_with(EXIT_USAGE, e))?;
    let names: &[&'static str] = match args.check.expect("mode group is required") {
        WordCheck::CubeFree => &["cube-free"],
        WordCheck::Circular6 => &["circular6"],
        WordCheck::Primitive => &["primitive"],
        WordCheck::All => &["cube-free", "circular6", "primitive"],
    };
    let outcomes: Vec<CheckOutcome> = names.iter().map(|&name| run_check(name, args.n_max, &t)).collect();
    let failure = outcomes.iter().find(|o| !o.pass).map(|o| {
        let c = o.counterexample.as_ref().expect("failed check has a counterexample");
        format!("{} fails at n={} word {} position {}", o.check, c.n, c.word, c.position)
    });
    emit(&args.out, "words", serde_json::json!({ "checks": outcomes }))?;
    match failure {
        Some(msg) => Err(exit_with(EXIT_DISAGREE, anyhow::anyhow!(msg))),
        None => Ok(()),
    }
}

fn map_dump(args: MapDumpArgs) -> Result<(), Exit> {
    let map = match &args.from {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let dump: MapDump = serde_json::from_str(&text).map_err(|e| exit_with(EXIT_USAGE, e))?;
            SkewProductMap::from_dump(&dump).map_err(|e| exit_with(EXIT_CONSTRUCTION, e))?
        }
        None => {
            let (coeffs, _) = read_input(args.coeffs.as_deref(), args.index.as_deref())?;
            map::build_map(&coeffs).map_err(|e: BuildError| exit_with(EXIT_CONSTRUCTION, e))?
        }
    };
    write_text(&args.out, &serde_json::to_string_pretty(&map.dump()).map_err(anyhow::Error::from)?)?;
    Ok(())
}

fn random_coefficients(rng: &mut ChaCha8Rng, max_period: u64, max_abs: i64) -> DoldCoefficients {
    let mut c = DoldCoefficients::new();
    for k in 1..=max_period {
        c.set(k, rng.random_range(-max_abs..=max_abs));
    }
    c
}

#[allow(clippy::too_many_arguments)]
fn sweep(cases: usize, seed: u64, max_n: usize, max_period: u64, max_abs: i64, out: &OutArgs) -> Result<(), Exit> {
    if max_n == 0 || max_period == 0 || max_abs < 0 {
        return Err(exit_with(EXIT_USAGE, anyhow::anyhow!("sweep bounds must be positive")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::with_capacity(cases);
    for _ in 0..cases {
        let coeffs = random_coefficients(&mut rng, max_period, max_abs);
        reports.push(index::verify(&coeffs, max_n).map_err(verify_exit)?);
    }
    let all_agree = reports.iter().all(|r| r.all_agree);
    emit(out, "sweep", serde_json::json!({ "seed": seed, "cases": cases, "all_agree": all_agree, "reports": reports }))?;
    if all_agree {
        Ok(())
    } else {
        Err(exit_with(EXIT_DISAGREE, anyhow::anyhow!("sweep found disagreeing iterates")))
    }
}

fn run(cli: Cli) -> Result<(), Exit> {
    match cli.command {
        Command::Realize(args) => realize(args),
        Command::Validate { index, out } => validate(&index, &out),
        Command::Invert { index, out } => invert(&index, &out),
        Command::Words(args) => words_cmd(args),
        Command::MapDump(args) => map_dump(args),
        Command::Separation { probe_period, n_max, threshold, out } => {
            if probe_period > 8 {
                return Err(exit_with(EXIT_USAGE, anyhow::anyhow!("--probe-period is at most 8")));
            }
            let report = orbit::separation_proxy(n_max, probe_period, threshold).map_err(|e| exit_with(EXIT_CONSTRUCTION, e))?;
            emit(&out, "separation", report)?;
            Ok(())
        }
        Command::Escape { input, samples, steps, band, out } => {
            let (coeffs, _) = read_input(input.coeffs.as_deref(), input.index.as_deref())?;
            let map = map::build_map(&coeffs).map_err(|e| exit_with(EXIT_CONSTRUCTION, e))?;
            let report = map.escape_scan(samples, steps, band);
            let clean = report.suspects.is_empty();
            emit(&out, "escape", serde_json::json!({ "coefficients": coeffs, "report": report }))?;
            if clean {
                Ok(())
            } else {
                Err(exit_with(EXIT_DISAGREE, anyhow::anyhow!("periodicity suspects found")))
            }
        }
        Command::Sweep { cases, seed, max_n, max_period, max_abs, out } => sweep(cases, seed, max_n, max_period, max_abs, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
