//! Seeded randomized invariant checks behind `delta-cli verify`.

use divisor_delta::{
    classify, delta, delta_oracle, delta_profile, moment, verify_pointwise_bounds, verify_recursion, Factorization,
    Params, Profile, Result, SpfSieve, DEFAULT_ORACLE_TAU,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::emit::CheckRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Oracle,
    M1,
    Recursion,
    Symmetry,
    Pointwise,
    Levelset,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [Suite::Oracle, Suite::M1, Suite::Recursion, Suite::Symmetry, Suite::Pointwise, Suite::Levelset];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Oracle => "oracle",
            Suite::M1 => "m1",
            Suite::Recursion => "recursion",
            Suite::Symmetry => "symmetry",
            Suite::Pointwise => "pointwise",
            Suite::Levelset => "levelset",
            Suite::All => "all",
        }
    }
}

pub const ORACLE_MAX_N: u64 = 200_000;
pub const M1_MAX_N: u64 = 10_000;
pub const RECURSION_MAX_N: u64 = 100_000;
pub const RECURSION_MAX_P: u64 = 997;
pub const RECURSION_TOL: f64 = 1e-8;
pub const M1_TOL: f64 = 1e-9;
const MAX_ORDER: u32 = 6;

/// Shared factorization tables for all suites.
pub struct Context {
    sieve: SpfSieve,
}

impl Context {
    pub fn new() -> Result<Self> {
        Ok(Self { sieve: SpfSieve::new(ORACLE_MAX_N)? })
    }

    fn factor(&self, n: u64) -> Factorization {
        self.sieve.factorize(n).expect("n within sieve range")
    }

    fn random_squarefree(&self, rng: &mut ChaCha8Rng, max: u64) -> Factorization {
        loop {
            let f = self.factor(rng.gen_range(1..=max));
            if f.is_squarefree() {
                return f;
            }
        }
    }
}

struct Tally {
    samples: u64,
    failures: u64,
    worst: f64,
}

impl Tally {
    fn new() -> Self {
        Self { samples: 0, failures: 0, worst: 0.0 }
    }

    fn record(&mut self, residual: f64, ok: bool) {
        self.samples += 1;
        if !ok {
            self.failures += 1;
        }
        if residual.is_nan() || residual > self.worst {
            self.worst = residual;
        }
    }

    fn finish(self, suite: Suite) -> CheckRow {
        CheckRow { suite: suite.name().into(), samples: self.samples, failures: self.failures, worst: self.worst, passed: self.failures == 0 }
    }
}

fn symmetric_at_midpoints(profile: &Profile, n: u64) -> bool {
    let reflect = (n as f64).ln() - 1.0;
    profile.midpoints().all(|m| profile.eval(m) == profile.eval(reflect - m))
}

/// Runs one suite (not [`Suite::All`]) on `samples` seeded cases.
pub fn run_suite(ctx: &Context, suite: Suite, samples: u64, rng: &mut ChaCha8Rng) -> Result<CheckRow> {
    let mut t = Tally::new();
    for _ in 0..samples {
        match suite {
            Suite::Oracle => {
                let divs = ctx.factor(rng.gen_range(1..=ORACLE_MAX_N)).divisors();
                let fast = delta(&divs);
                let exact = delta_oracle(&divs, DEFAULT_ORACLE_TAU)?;
                t.record(fast.abs_diff(exact) as f64, fast == exact);
            }
            Suite::M1 => {
                let divs = ctx.factor(rng.gen_range(1..=M1_MAX_N)).divisors();
                let tau = divs.tau() as f64;
                let m1 = moment(&delta_profile::<f64>(&divs), 1)?;
                let r = (m1 - tau).abs() / tau;
                t.record(r, r <= M1_TOL);
            }
            Suite::Recursion => {
                let n = ctx.random_squarefree(rng, RECURSION_MAX_N);
                let p = loop {
                    let p = rng.gen_range(2..=RECURSION_MAX_P);
                    if ctx.sieve.is_prime(p) && !n.divides_by(p) {
                        break p;
                    }
                };
                let q = rng.gen_range(2..=MAX_ORDER);
                let r: f64 = verify_recursion(&n, p, q)?;
                t.record(r, r <= RECURSION_TOL);
            }
            Suite::Symmetry => {
                let n = rng.gen_range(1..=M1_MAX_N);
                let profile = delta_profile::<f64>(&ctx.factor(n).divisors());
                let ok = symmetric_at_midpoints(&profile, n);
                t.record(if ok { 0.0 } else { 1.0 }, ok);
            }
            Suite::Pointwise => {
                let divs = ctx.factor(rng.gen_range(1..=RECURSION_MAX_N)).divisors();
                let q = rng.gen_range(1..=MAX_ORDER);
                let report = verify_pointwise_bounds::<f64>(&divs, q)?;
                let ratio = (report.delta as f64).powi(q as i32) / (2f64.powi(q as i32) * report.moment);
                t.record(ratio, report.holds());
            }
            Suite::Levelset => {
                let n = ctx.random_squarefree(rng, RECURSION_MAX_N);
                let a = [2.0, 4.0, 16.0, 64.0][rng.gen_range(0..4)];
                let params = Params::with_defaults(a, 1e6)?;
                let whole = classify(&n, &params, 2)?;
                let mut ok = true;
                for p in n.primes() {
                    let prefix = n.smooth_part(p as f64 + 0.5);
                    if whole.in_sa && !classify(&prefix, &params, 2)?.in_sa {
                        ok = false;
                    }
                }
                t.record(if ok { 0.0 } else { 1.0 }, ok);
            }
            Suite::All => unreachable!("expanded by caller"),
        }
    }
    Ok(t.finish(suite))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn every_suite_passes_small_sample() {
        let ctx = Context::new().unwrap();
        for s in Suite::EACH {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let row = run_suite(&ctx, s, 20, &mut rng).unwrap();
            assert!(row.passed, "{row:?}");
            assert_eq!(row.samples, 20);
        }
    }

    #[test]
    fn symmetry_detects_asymmetry() {
        let profile = Profile::from_pieces(vec![0.0, 0.5, 2.0], vec![1, 2]).unwrap();
        assert!(!symmetric_at_midpoints(&profile, 20));
    }
}
