//! Acceptance suite: one line per criterion, non-zero exit if a blocking
//! criterion fails. Tolerances and budgets are the constants below.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use fpindex::dold::{self, DoldCoefficients, IndexSequence};
use fpindex::index;
use fpindex::map::{build_map, SkewProductMap};
use fpindex::orbit::{self, doubling, word_to_angle};
use fpindex::rational;
use fpindex::words::{self, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x00F1_7ED0;
const FIXTURE_BUDGET: Duration = Duration::from_secs(10);
const SWEEP_BUDGET: Duration = Duration::from_secs(120);
const WORDS_BUDGET: Duration = Duration::from_secs(30);
const SWEEP_CASES: usize = 25;
const SWEEP_MAX_N: usize = 10;
const ROUND_TRIPS: usize = 1000;
const ESCAPE_SAMPLES: usize = 1000;
const ESCAPE_STEPS: usize = 50;
const ESCAPE_BAND: f64 = 5.0;
const ESCAPE_MIN_FRACTION: f64 = 0.99;
const SEPARATION_N_MAX: usize = 64;
const SEPARATION_PROBE_PERIOD: usize = 3;

type Criterion = (&'static str, fn() -> Outcome);

enum Status {
    Pass,
    Fail,
    Warn,
}

struct Outcome {
    status: Status,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { status: Status::Pass, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { status: Status::Fail, detail: detail.into() }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn within(budget: Duration, started: Instant, outcome: Outcome) -> Outcome {
    let elapsed = started.elapsed();
    match outcome.status {
        Status::Pass if elapsed >= budget => fail(format!("{}; took {elapsed:.2?}, budget {budget:?}", outcome.detail)),
        _ => outcome,
    }
}

fn coeffs(lit: &str) -> DoldCoefficients {
    lit.parse().expect("coefficient literal")
}

/// `Σ_{k | n} k·a_k`, computed directly.
fn index_oracle(c: &DoldCoefficients, n: usize) -> i64 {
    c.iter().filter(|&(k, _)| (n as u64).is_multiple_of(k)).map(|(k, a)| k as i64 * a).sum()
}

/// Every iterate `1..=max_n` has numeric, combinatorial and target index equal
/// to the oracle; returns the first disagreement.
fn verify_against_oracle(c: &DoldCoefficients, max_n: usize) -> Result<(), String> {
    let report = index::verify(c, max_n).map_err(|e| format!("{c}: {e}"))?;
    for row in &report.rows {
        let want = index_oracle(c, row.n);
        if row.numeric != want || row.combinatorial != want || row.target != want {
            return Err(format!(
                "{{{c}}} n={}: numeric={} combinatorial={} target={} expected {want}",
                row.n, row.numeric, row.combinatorial, row.target
            ));
        }
    }
    if report.rows.len() != max_n {
        return Err(format!("{{{c}}}: {} rows for max_n {max_n}", report.rows.len()));
    }
    Ok(())
}

fn random_coefficients(rng: &mut ChaCha8Rng, max_period: u64, max_abs: i64) -> DoldCoefficients {
    let mut c = DoldCoefficients::new();
    for k in 1..=max_period {
        c.set(k, rng.random_range(-max_abs..=max_abs));
    }
    c
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_fpindex"))
        .args(["realize", "--coeffs", "1:0", "--max-n", "8"])
        .output()
        .expect("run fpindex");
    let outcome = (|| {
        if !out.status.success() {
            return fail(format!("exit status {}", out.status));
        }
        let json: serde_json::Value = serde_json::from_slice(&out.stdout).expect("realize emits JSON");
        let rows = json["rows"].as_array().cloned().unwrap_or_default();
        if rows.len() != 8 {
            return fail(format!("{} rows", rows.len()));
        }
        for (i, row) in rows.iter().enumerate() {
            for field in ["numeric", "combinatorial", "target"] {
                if row["n"].as_u64() != Some(i as u64 + 1) || row[field].as_i64() != Some(0) {
                    return fail(format!("row {}: {field} = {}", i + 1, row[field]));
                }
            }
        }
        pass("all indices 0 for n = 1..8 via the CLI")
    })();
    within(FIXTURE_BUDGET, started, outcome)
}

fn criterion_2() -> Outcome {
    let c = coeffs("1:2");
    match verify_against_oracle(&c, 8) {
        Ok(()) => pass("all indices 2 for n = 1..8"),
        Err(e) => fail(e),
    }
}

fn criterion_3() -> Outcome {
    for m in 1..=4i64 {
        for value in [1 - m, 1 + m] {
            let c = coeffs(&format!("1:{value}"));
            if let Err(e) = verify_against_oracle(&c, 6) {
                return fail(e);
            }
        }
    }
    pass("constant 1-m and 1+m for m = 1..4, n = 1..6")
}

fn criterion_4() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let cases: Vec<DoldCoefficients> = (0..SWEEP_CASES).map(|_| random_coefficients(&mut rng, 5, 3)).collect();
    for c in &cases {
        if let Err(e) = verify_against_oracle(c, SWEEP_MAX_N) {
            return fail(e);
        }
    }
    within(
        SWEEP_BUDGET,
        started,
        pass(format!("{SWEEP_CASES} seeded maps agree for n = 1..{SWEEP_MAX_N} in {:.2?}", started.elapsed())),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    for _ in 0..ROUND_TRIPS {
        let max_period = rng.random_range(1..=24);
        let c = random_coefficients(&mut rng, max_period, 50);
        let len = rng.random_range(1..=40usize);
        let seq = match dold::expand(&c, len) {
            Ok(s) => s,
            Err(e) => return fail(format!("expand {{{c}}}: {e}")),
        };
        if !dold::check_congruences(&seq).is_pass() {
            return fail(format!("expand {{{c}}} to {len} fails the congruences"));
        }
        let back = match dold::invert(&seq) {
            Ok(b) => b,
            Err(e) => return fail(format!("invert {seq}: {e}")),
        };
        if back != c.truncated(len as u64) {
            return fail(format!("round trip {{{c}}} -> {{{back}}} at length {len}"));
        }
        if dold::expand(&back, len).ok().as_ref() != Some(&seq) {
            return fail(format!("expand(invert({seq})) differs"));
        }
        for (n, want) in seq.values().iter().enumerate() {
            if *want != index_oracle(&c, n + 1) {
                return fail(format!("expand {{{c}}} at n={}: {want}", n + 1));
            }
        }
    }
    for k in 1..=12i64 {
        let sigma: IndexSequence = match dold::normalized_sequence(k, 60) {
            Ok(s) => s,
            Err(e) => return fail(format!("sigma^{k}: {e}")),
        };
        if !dold::check_congruences(&sigma).is_pass() {
            return fail(format!("sigma^{k} fails the congruences"));
        }
    }
    pass(format!("{ROUND_TRIPS} round trips exact; sigma^k passes for k <= 12"))
}

fn criterion_6() -> Outcome {
    let started = Instant::now();
    let outcome = match words::ptm_prefix(4096) {
        Err(e) => fail(e.to_string()),
        Ok(t) => {
            let nested = [1usize, 2, 3, 17, 255, 1024, 4095]
                .iter()
                .all(|&n| words::ptm_prefix(n).map(|w| w.is_prefix_of(&t)).unwrap_or(false));
            match words::shortest_prefix_with_power(&t, 3) {
                _ if !nested => fail("prefixes are not nested"),
                None => pass("no prefix up to length 4096 contains a cube"),
                Some(n) => fail(format!("prefix of length {n} contains a cube")),
            }
        }
    };
    within(WORDS_BUDGET, started, outcome)
}

fn criterion_7() -> Outcome {
    let started = Instant::now();
    let mut outcome = pass("every prefix up to length 256 is circularly 6-power-free");
    for n in 1..=256 {
        let w = words::ptm_prefix(n).expect("prefix");
        if let Some(occ) = words::find_circular_power(&w, 6) {
            outcome = fail(format!("n={n}: 6-power of block {} at {}", occ.block, occ.start));
            break;
        }
    }
    within(WORDS_BUDGET, started, outcome)
}

fn criterion_8() -> Outcome {
    let mut count = 0usize;
    for len in 1..=12usize {
        for value in 0u32..(1 << len) {
            let w = Word::from_bits((0..len).rev().map(|i| ((value >> i) & 1) as u8).collect());
            if doubling(&word_to_angle(&w)) != word_to_angle(&w.rotate(1)) {
                return fail(format!("{w}: doubling does not commute with rotation"));
            }
            count += 1;
        }
    }
    check(count == (1 << 13) - 2, format!("{count} words of length 1..12 commute exactly"))
}

fn escape_panel() -> Vec<DoldCoefficients> {
    let mut panel: Vec<DoldCoefficients> = ["1:0", "1:2", "1:-3", "1:5", "2:1", "1:-2,3:1", "1:1,2:-3"]
        .iter()
        .map(|s| coeffs(s))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    panel.extend((0..3).map(|_| random_coefficients(&mut rng, 5, 3)));
    panel
}

fn criterion_9() -> Outcome {
    let mut problems = Vec::new();
    let mut worst_end = 1.0f64;
    for c in escape_panel() {
        let map = build_map(&c).expect("panel map builds");
        let report = map.escape_scan(ESCAPE_SAMPLES, ESCAPE_STEPS, ESCAPE_BAND);
        worst_end = worst_end.min(report.outside_at_end as f64 / ESCAPE_SAMPLES as f64);
        if !report.suspects.is_empty() {
            problems.push(format!("{{{c}}}: {} periodicity suspects", report.suspects.len()));
        }
        if report.fraction_escaped < ESCAPE_MIN_FRACTION {
            problems.push(format!("{{{c}}}: escaped fraction {}", report.fraction_escaped));
        }
    }
    match orbit::separation_proxy(SEPARATION_N_MAX, SEPARATION_PROBE_PERIOD, orbit::SEPARATION_THRESHOLD) {
        Ok(r) if r.pass => {}
        Ok(r) => {
            let flagged: Vec<String> = r.rows.iter().filter(|row| row.flagged).map(|row| row.probe.to_string()).collect();
            problems.push(format!("separation flags {}", flagged.join(",")));
        }
        Err(e) => problems.push(format!("separation: {e}")),
    }
    if problems.is_empty() {
        pass(format!(
            "no suspects, all samples leave |r| <= {ESCAPE_BAND} (min {worst_end:.3} outside at the last step); separation floors positive to {SEPARATION_N_MAX}"
        ))
    } else {
        Outcome { status: Status::Warn, detail: problems.join("; ") }
    }
}

/// Exact structural invariants of the angular lift and the radial update.
fn well_formed(map: &SkewProductMap) -> Result<(), String> {
    let two = rational::parse("2").expect("literal");
    let minus_one = rational::parse("-1").expect("literal");
    let angular = map.angular();
    let pieces = angular.pieces();
    for pair in pieces.windows(2) {
        let left = pair[0].eval_exact(&pair[0].domain.1);
        let right = pair[1].eval_exact(&pair[1].domain.0);
        if pair[0].domain.1 != pair[1].domain.0 || left != right {
            return Err(format!("discontinuity at {}", rational::to_string(&pair[1].domain.0)));
        }
    }
    let first = &pieces[0];
    let last = &pieces[pieces.len() - 1];
    let (wrap_image, wrap_dr) = last.eval_exact(&last.domain.1);
    let (start_image, start_dr) = first.eval_exact(&first.domain.0);
    if &wrap_image - &start_image != two || wrap_dr != start_dr {
        return Err("lift is not degree 2 across the fundamental domain".into());
    }
    let steps = 16;
    for piece in pieces {
        if piece.domain.0 >= piece.domain.1 || piece.image.0 >= piece.image.1 {
            return Err(format!("degenerate piece at {}", rational::to_string(&piece.domain.0)));
        }
        let (a, b) = &piece.domain;
        let mut prev: Option<_> = None;
        for j in 0..=steps {
            let t = a + (b - a) * rational::parse(&format!("{j}/{steps}")).expect("literal");
            let (image, _) = piece.eval_exact(&t);
            if prev.as_ref().is_some_and(|p| &image <= p) {
                return Err(format!("lift not increasing near {}", rational::to_string(&t)));
            }
            prev = Some(image);
        }
    }
    let blowup = map.blowup();
    for iv in blowup.intervals() {
        let target = blowup
            .interval_of(&doubling(&iv.alpha))
            .ok_or_else(|| format!("image of {} is not blown up", iv.alpha))?;
        for (end, want) in [(&iv.left, &target.left), (&iv.right, &target.right)] {
            let (image, dr) = angular.eval_exact(end);
            if !(&image - want).is_integer() {
                return Err(format!("endpoint {} does not map to an endpoint", rational::to_string(end)));
            }
            if dr != minus_one {
                return Err(format!("radial step at {} is not -1", rational::to_string(end)));
            }
            if blowup.project(end) != iv.alpha {
                return Err(format!("endpoint {} does not project to its angle", rational::to_string(end)));
            }
        }
    }
    Ok(())
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    let mut panel: Vec<DoldCoefficients> = ["", "1:0", "1:2", "1:-3", "1:0,3:1", "2:-1,4:2"].iter().map(|s| coeffs(s)).collect();
    panel.extend((0..25).map(|_| random_coefficients(&mut rng, 5, 3)));
    for c in &panel {
        let map = match build_map(c) {
            Ok(m) => m,
            Err(e) => return fail(format!("{{{c}}}: {e}")),
        };
        if let Err(e) = well_formed(&map) {
            return fail(format!("{{{c}}}: {e}"));
        }
    }
    pass(format!("{} maps: continuous, degree 2, increasing, endpoints to endpoints", panel.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("sector-free fixture has index 0", criterion_1),
        ("doubled fixture has index 2", criterion_2),
        ("m-sector fixtures have index 1-m and 1+m", criterion_3),
        ("random maps realize their index sequences", criterion_4),
        ("index sequence algebra is exact", criterion_5),
        ("Thue-Morse prefixes are cube-free", criterion_6),
        ("Thue-Morse prefixes are circularly 6-power-free", criterion_7),
        ("doubling is conjugate to rotation", criterion_8),
        ("origin is the only periodic point (heuristic)", criterion_9),
        ("constructed maps are well formed", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = run();
        let tag = match outcome.status {
            Status::Pass => "PASS",
            Status::Warn => "WARN",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
        };
        println!("{tag} {:>2} {name}: {} [{:.2?}]", i + 1, outcome.detail, started.elapsed());
    }
    println!("acceptance: {} of {} criteria failed", failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
