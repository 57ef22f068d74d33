#![allow(clippy::excessive_precision)]

//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::time::Instant;

use divisor_delta::survey::decade_grid;
use divisor_delta::{
    classify, delta, delta_oracle, delta_profile, euler_product, exponent_fit, gauss_tail, moment, partial_sum_delta,
    recurse_check, survey, verify_pointwise_bounds, verify_recursion, Error, Factorization, FitModel, Params, Profile,
    SpfSieve, SurveyOptions, SurveyRecord, DEFAULT_ORACLE_TAU,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

const MERTENS_GOLDEN: [(u64, f64); 5] = [
    (1_000, 0.91705117611791589),
    (10_000, 0.91189477385783551),
    (100_000, 0.91018141731114043),
    (1_000_000, 0.90969665505126976),
    (10_000_000, 0.90964305724730854),
];
const GAUSS_TAIL_MAX_GOLDEN: f64 = 0.18482956971757193;
const R2_MAX_GOLDEN: f64 = 2.2569444444444444;
const R3_MAX_GOLDEN: [(f64, f64); 3] = [(10.0, 0.26860731978290296), (100.0, 0.26399280680266834), (1000.0, 0.261330327084467)];

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: Error) -> String {
    format!("error: {e}")
}

fn squarefree(sieve: &SpfSieve, rng: &mut ChaCha8Rng, max: u64) -> Factorization {
    loop {
        let f = sieve.factorize(rng.gen_range(1..=max)).unwrap();
        if f.is_squarefree() {
            return f;
        }
    }
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let sieve = SpfSieve::new(200_000).map_err(err)?;
    let mut mismatches = Vec::new();
    for n in 1..=200_000u64 {
        let divs = sieve.factorize(n).unwrap().divisors();
        if delta(&divs) != delta_oracle(&divs, DEFAULT_ORACLE_TAU).map_err(err)? {
            mismatches.push(n);
        }
    }
    let secs = started.elapsed().as_secs_f64();
    check(mismatches.is_empty() && secs < 60.0, format!("n ≤ 2e5, mismatches {mismatches:?}, {secs:.2} s (limit 60 s)"))
}

fn m1_identity() -> Outcome {
    let sieve = SpfSieve::new(10_000).map_err(err)?;
    let mut worst = 0f64;
    for n in 1..=10_000u64 {
        let divs = sieve.factorize(n).unwrap().divisors();
        let tau = divs.tau() as f64;
        let m1 = moment(&delta_profile::<f64>(&divs), 1).map_err(err)?;
        worst = worst.max((m1 - tau).abs() / tau);
    }
    check(worst <= 1e-9, format!("n ≤ 1e4, max |M1 − τ|/τ = {worst:.3e} (limit 1e-9)"))
}

fn recursion() -> Outcome {
    let sieve = SpfSieve::new(100_000).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0f64;
    for _ in 0..1000 {
        let n = squarefree(&sieve, &mut rng, 100_000);
        let p = loop {
            let p = rng.gen_range(2..=997);
            if sieve.is_prime(p) && !n.divides_by(p) {
                break p;
            }
        };
        let q = rng.gen_range(2..=6);
        let r: f64 = verify_recursion(&n, p, q).map_err(err)?;
        if r.is_nan() || r > worst {
            worst = r;
        }
    }
    check(worst <= 1e-8, format!("1000 triples, max relative residual {worst:.3e} (limit 1e-8)"))
}

fn symmetry() -> Outcome {
    let sieve = SpfSieve::new(10_000).map_err(err)?;
    let mut bad = Vec::new();
    let mut points = 0usize;
    for n in 1..=10_000u64 {
        let profile: Profile = delta_profile(&sieve.factorize(n).unwrap().divisors());
        let reflect = (n as f64).ln() - 1.0;
        for m in profile.midpoints() {
            points += 1;
            if profile.eval(m) != profile.eval(reflect - m) {
                bad.push(n);
                break;
            }
        }
    }
    check(bad.is_empty(), format!("n ≤ 1e4, {points} midpoints, asymmetric n: {bad:?}"))
}

fn pointwise() -> Outcome {
    let sieve = SpfSieve::new(100_000).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut failures = Vec::new();
    for _ in 0..1000 {
        let n = rng.gen_range(1..=100_000u64);
        let divs = sieve.factorize(n).unwrap().divisors();
        for q in 1..=6 {
            if !verify_pointwise_bounds::<f64>(&divs, q).map_err(err)?.holds() {
                failures.push((n, q));
            }
        }
    }
    check(failures.is_empty(), format!("1000 samples n ≤ 1e5, q,b ∈ 1..=6, exceptions {failures:?}"))
}

fn sandwich(records: &[SurveyRecord]) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for r in records.iter().filter(|r| (1_000..=10_000_000).contains(&r.x)) {
        let x = r.x as f64;
        let upper = x * (1.0 + x.ln());
        let holds = r.x as u128 <= r.sum_delta && (r.sum_delta as f64) <= upper;
        ok &= holds;
        lines.push(format!("x={} sum={}", r.x, r.sum_delta));
    }
    let r7 = records.iter().find(|r| r.x == 10_000_000).ok_or("no record at 1e7")?;
    ok &= r7.elapsed_s < 300.0;
    check(ok, format!("{}; 1e7 single-worker in {:.1} s (limit 300 s)", lines.join(", "), r7.elapsed_s))
}

fn speedup(single: &SurveyRecord) -> Outcome {
    let opts = SurveyOptions { workers: 4, ..SurveyOptions::default() };
    let four = partial_sum_delta(10_000_000, &opts).map_err(err)?;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let ratio = single.elapsed_s / four.elapsed_s;
    check(
        ratio >= 2.0 && four.sum_delta == single.sum_delta,
        format!("1e7: 1 worker {:.1} s, 4 workers {:.1} s, speedup {ratio:.2}x (need ≥ 2x; {cores} core(s) available)", single.elapsed_s, four.elapsed_s),
    )
}

fn determinism() -> Outcome {
    let x = 1_000_000;
    let run = |workers, block_size| {
        partial_sum_delta(x, &SurveyOptions { workers, block_size, ..SurveyOptions::default() }).map(|r| r.sum_delta)
    };
    let one = run(1, 1 << 16).map_err(err)?;
    let four = run(4, 1 << 16).map_err(err)?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("ckpt.jsonl");
    let opts = SurveyOptions { workers: 2, block_size: 1 << 16, checkpoint: Some(path.clone()), stop_after_blocks: Some(5) };
    let killed = matches!(survey(&[x], &opts), Err(Error::Interrupted { completed_blocks: 5 }));
    let resumed = survey(&[x], &SurveyOptions { stop_after_blocks: None, ..opts }).map_err(err)?[0].sum_delta;
    check(
        killed && one == four && one == resumed,
        format!("x=1e6: workers 1 → {one}, workers 4 → {four}, killed after 5 blocks: {killed}, resumed → {resumed}"),
    )
}

fn mertens() -> Outcome {
    let sieve = SpfSieve::new(10_000_000).map_err(err)?;
    let mut lines = Vec::new();
    let mut ok = true;
    for (x, golden) in MERTENS_GOLDEN {
        let xf = x as f64;
        let ratio = euler_product(&sieve, 1.0, xf, 1).map_err(err)? / xf.ln().powi(2);
        let within = (ratio / golden - 1.0).abs() <= 0.05;
        ok &= within;
        lines.push(format!("x=1e{} {ratio:.6}", x.ilog10()));
    }
    check(ok, format!("{} (band ±5% of goldens)", lines.join(", ")))
}

fn level_sets() -> Outcome {
    let sieve = SpfSieve::new(100_000).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut broken = Vec::new();
    for _ in 0..1000 {
        let n = squarefree(&sieve, &mut rng, 100_000);
        let a = [2.0, 4.0, 16.0, 64.0][rng.gen_range(0..4)];
        let params = Params::with_defaults(a, 1e6).map_err(err)?;
        if classify(&n, &params, 2).map_err(err)?.in_sa {
            for p in n.primes() {
                if !classify(&n.smooth_part(p as f64 + 0.5), &params, 2).map_err(err)?.in_sa {
                    broken.push(n.n());
                }
            }
        }
    }
    let mut ratios = Vec::new();
    for a in [4.0, 16.0, 64.0] {
        let params = Params::new(a, 0.01, 10.0, 1e3).map_err(err)?;
        let tail = gauss_tail(&params, 1_000_000).map_err(err)?;
        ratios.push(tail.value * a / 1e3f64.ln());
    }
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    check(
        broken.is_empty() && max <= GAUSS_TAIL_MAX_GOLDEN * 1.1,
        format!("prefix closure violations {broken:?}; tail·A/Log x = {ratios:.6?}, max {max:.6} (golden {GAUSS_TAIL_MAX_GOLDEN:.6} ±10%)"),
    )
}

fn recurse_health() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (a, r3_golden) in R3_MAX_GOLDEN {
        let params = Params::new(a, 0.01, 10.0, 1e6).map_err(err)?;
        let report = recurse_check(20, &params).map_err(err)?;
        let (r2, r3) = (report.r2_max(), report.r3_max());
        ok &= (r2 / R2_MAX_GOLDEN - 1.0).abs() <= 0.1 && (r3 / r3_golden - 1.0).abs() <= 0.1;
        lines.push(format!("A={a}: R2 {r2:.6} R3 {r3:.6}"));
    }
    check(ok, format!("{} (goldens R2 {R2_MAX_GOLDEN:.6}, R3 {:.6?} ±10%)", lines.join(", "), R3_MAX_GOLDEN.map(|g| g.1)))
}

fn trend(records: &[SurveyRecord]) -> Outcome {
    let fit_range: Vec<SurveyRecord> = records.iter().filter(|r| r.x >= 10_000).cloned().collect();
    let log = exponent_fit(&fit_range, FitModel::PowLog).map_err(err)?;
    let loglog = exponent_fit(&fit_range, FitModel::PowLoglog).map_err(err)?;
    check(
        log.exponent < 1.0,
        format!(
            "x=1e4..1e8: pow_log exponent {:.4} (residual {:.2e}), pow_loglog exponent {:.4} (residual {:.2e})",
            log.exponent, log.residual, loglog.exponent, loglog.residual
        ),
    )
}

fn report(id: &str, name: &str, outcome: Outcome, failed: &mut Vec<String>) {
    match outcome {
        Ok(detail) => println!("PASS [{id}] {name}: {detail}"),
        Err(detail) => {
            println!("FAIL [{id}] {name}: {detail}");
            failed.push(id.to_string());
        }
    }
}

fn main() {
    let mut failed = Vec::new();
    report("1", "oracle equivalence", oracle_equivalence(), &mut failed);
    report("2", "M1 identity", m1_identity(), &mut failed);
    report("3", "moment recursion", recursion(), &mut failed);
    report("4", "profile symmetry", symmetry(), &mut failed);
    report("5", "pointwise inequalities", pointwise(), &mut failed);

    let records = survey(&decade_grid(100_000_000), &SurveyOptions { workers: 1, ..SurveyOptions::default() });
    match records {
        Ok(records) => {
            report("6a", "sandwich bound and single-worker time", sandwich(&records), &mut failed);
            let r7 = records.iter().find(|r| r.x == 10_000_000).expect("grid contains 1e7").clone();
            report("6b", "4-worker speedup", speedup(&r7), &mut failed);
            report("7", "determinism and resume", determinism(), &mut failed);
            report("8", "Mertens band", mertens(), &mut failed);
            report("9", "level-set consistency", level_sets(), &mut failed);
            report("10", "recursion health of m_qA", recurse_health(), &mut failed);
            report("11", "trend fit", trend(&records), &mut failed);
        }
        Err(e) => {
            println!("FAIL [6-11] survey to 1e8: {e}");
            failed.push("survey".into());
        }
    }

    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {}", failed.join(", "));
        std::process::exit(1);
    }
}
