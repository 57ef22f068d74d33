use divisor_delta::{
    classify, cross_correlation, delta, delta_profile, moment, verify_recursion, Factorization, Moments, Params, Profile, SpfSieve,
};
use proptest::prelude::*;
use std::sync::OnceLock;

const LIMIT: u64 = 200_000;

fn sieve() -> &'static SpfSieve {
    static S: OnceLock<SpfSieve> = OnceLock::new();
    S.get_or_init(|| SpfSieve::new(LIMIT).unwrap())
}

fn factor(n: u64) -> Factorization {
    sieve().factorize(n).unwrap()
}

fn small_primes() -> Vec<u64> {
    sieve().primes().iter().take_while(|&&p| p <= 997).map(|&p| p as u64).collect()
}

/// Squarefree `n ≤ 1e5` with a prime `p ≤ 997` not dividing it.
fn squarefree_and_prime() -> impl Strategy<Value = (Factorization, u64)> {
    (1u64..=100_000, 0usize..168).prop_filter_map("squarefree n, p ∤ n", |(n, i)| {
        let f = factor(n);
        let p = small_primes()[i];
        (f.is_squarefree() && !f.divides_by(p)).then_some((f, p))
    })
}

fn sample_points(profiles: &[&Profile]) -> Vec<f64> {
    let mut bps: Vec<f64> = profiles.iter().flat_map(|p| p.breakpoints().iter().copied()).collect();
    bps.sort_by(f64::total_cmp);
    // the same real breakpoint can arrive from two profiles a few ulps apart
    bps.dedup_by(|b, a| *b - *a < 1e-9);
    let mut pts: Vec<f64> = bps.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    if let (Some(first), Some(last)) = (bps.first(), bps.last()) {
        pts.push(first - 0.5);
        pts.push(last + 0.5);
    }
    pts
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn delta_between_one_and_tau(n in 1u64..=LIMIT) {
        let divs = factor(n).divisors();
        let d = delta(&divs);
        prop_assert!(1 <= d && d as usize <= divs.tau());
    }

    #[test]
    fn delta_grows_under_multiplication(n in 1u64..=200, i in 0usize..168) {
        let p = small_primes()[i];
        prop_assert!(delta(&factor(n * p).divisors()) >= delta(&factor(n).divisors()));
    }

    #[test]
    fn symmetric_at_midpoints(n in 1u64..=LIMIT) {
        let profile: Profile = delta_profile(&factor(n).divisors());
        let reflect = (n as f64).ln() - 1.0;
        for m in profile.midpoints() {
            prop_assert_eq!(profile.eval(m), profile.eval(reflect - m));
        }
    }

    #[test]
    fn reversed_values_for_symmetric_profile(n in 1u64..=LIMIT) {
        let profile: Profile = delta_profile(&factor(n).divisors());
        let rev: Vec<u64> = profile.values().iter().rev().copied().collect();
        prop_assert_eq!(profile.values(), &rev[..]);
    }

    #[test]
    fn shift_identity((n, p) in squarefree_and_prime()) {
        let prof_n: Profile = delta_profile(&n.divisors());
        let prof_np: Profile = delta_profile(&n.times_prime(p).unwrap().divisors());
        let shifted = prof_n.shifted((p as f64).ln());
        for u in sample_points(&[&prof_n, &prof_np, &shifted]) {
            prop_assert_eq!(prof_np.eval(u), prof_n.eval(u) + shifted.eval(u), "u = {}", u);
        }
    }

    #[test]
    fn cross_correlation_symmetric((n, p) in squarefree_and_prime(), a in 1u32..=5, b in 1u32..=5) {
        let prof: Profile = delta_profile(&n.divisors());
        let s = (p as f64).ln();
        let lhs = cross_correlation(&prof, s, a, b).unwrap();
        let rhs = cross_correlation(&prof, s, b, a).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn recursion_residual((n, p) in squarefree_and_prime(), q in 2u32..=6) {
        let r: f64 = verify_recursion(&n, p, q).unwrap();
        prop_assert!(r <= 1e-8, "residual {}", r);
    }

    #[test]
    fn normalized_moment_grows((n, p) in squarefree_and_prime(), q in 1u32..=6) {
        let np = n.times_prime(p).unwrap();
        let before = moment(&delta_profile::<f64>(&n.divisors()), q).unwrap() / n.tau() as f64;
        let after = moment(&delta_profile::<f64>(&np.divisors()), q).unwrap() / np.tau() as f64;
        prop_assert!(after >= before * (1.0 - 1e-12));
    }

    #[test]
    fn normalized_power_means_monotone(n in 1u64..=LIMIT) {
        let t = Moments::new(&factor(n).divisors(), 10).unwrap();
        prop_assert!(t.normalized_power_means_nondecreasing(1e-12), "{:?}", t.normalized_power_means());
    }

    #[test]
    fn smooth_part_monotone(n in 1u64..=LIMIT, y1 in 1.0f64..500.0, dy in 0.0f64..500.0) {
        let f = factor(n);
        let (a, b) = (f.smooth_part(y1), f.smooth_part(y1 + dy));
        prop_assert_eq!(b.n() % a.n(), 0);
        let (lo, hi) = f.split_at(y1);
        prop_assert_eq!(lo.n() * hi.n(), n);
    }

    #[test]
    fn classify_monotone_in_a(n in 1u64..=100_000, a in 1.0f64..200.0, factor_ in 1.0f64..10.0) {
        let f = factor(n);
        prop_assume!(f.is_squarefree());
        let small = classify(&f, &Params::with_defaults(a, 1e6).unwrap(), 1).unwrap();
        let large = classify(&f, &Params::with_defaults(a * factor_, 1e6).unwrap(), 1).unwrap();
        prop_assert!(!small.in_sa || large.in_sa);
    }

    #[test]
    fn prefix_closure(n in 1u64..=100_000, a in 1.5f64..100.0) {
        let f = factor(n);
        prop_assume!(f.is_squarefree());
        let params = Params::with_defaults(a, 1e6).unwrap();
        if classify(&f, &params, 1).unwrap().in_sa {
            for p in f.primes() {
                prop_assert!(classify(&f.smooth_part(p as f64 + 0.5), &params, 1).unwrap().in_sa);
            }
        }
    }
}

#[test]
fn profile_integral_is_tau_and_max_is_delta() {
    for n in [720720u64, 1 << 17, 2 * 3 * 5 * 7 * 11 * 13 * 17, 199_999] {
        let divs = Factorization::from_prime_powers(trial(n)).unwrap().divisors();
        let profile: Profile = delta_profile(&divs);
        assert!((moment(&profile, 1).unwrap() - divs.tau() as f64).abs() < 1e-9 * divs.tau() as f64);
        assert_eq!(profile.max_value(), delta(&divs));
    }
}

fn trial(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut k = 0;
        while n.is_multiple_of(p) {
            n /= p;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
