//! Moments `M_q(n) = ∫ Δ(n;u)^q du`, shifted cross-correlations, and the
//! identities and inequalities tying them together.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::arith::{DivisorList, Factorization};
use crate::delta::{delta_of_sorted, delta_profile};
use crate::econst::{e_times_gt, exact_cmp};
use crate::error::{Error, Result};
use crate::num::{CompensatedSum, Real, WideInt};
use crate::step::StepFunction;

/// Largest supported moment order.
pub const MAX_Q: u32 = 64;

/// Default bound on the number of `b`-tuples the tuple oracle will visit.
pub const DEFAULT_TUPLE_GUARD: u64 = 10_000_000;

fn check_order(name: &'static str, q: u32) -> Result<()> {
    if q == 0 {
        return Err(Error::InvalidArgument(format!("{name} must be at least 1")));
    }
    if q > MAX_Q {
        return Err(Error::out_of_range(name, q, format!("[1, {MAX_Q}]")));
    }
    Ok(())
}

/// `M_q(n)` from the profile of `n`.
pub fn moment<T: Real>(profile: &StepFunction<T>, q: u32) -> Result<T> {
    check_order("q", q)?;
    Ok(profile.integrate_power(q))
}

/// `∫ P(u)^a P(u − shift)^b du`.
pub fn cross_correlation<T: Real>(profile: &StepFunction<T>, shift: T, a: u32, b: u32) -> Result<T> {
    check_order("a", a)?;
    check_order("b", b)?;
    Ok(profile.integrate_product(a, &profile.shifted(shift), b))
}

/// `M_b(n)` as `Σ (log d_min + 1 − log d_max)` over `b`-tuples of divisors
/// with `d_max < e·d_min`, enumerated one tuple at a time.
pub fn moment_tuple_oracle<T: Real>(divs: &DivisorList, b: u32, max_tuples: u64) -> Result<T> {
    check_order("b", b)?;
    let d = divs.as_slice();
    let total = (d.len() as u64).checked_pow(b).filter(|&t| t <= max_tuples).ok_or_else(|| {
        Error::GuardExceeded(format!("τ({})^{b} tuples exceeds oracle bound {max_tuples}", divs.n()))
    })?;
    let logs: Vec<T> = d.iter().map(|&x| T::of(x).ln()).collect();
    let mut idx = vec![0usize; b as usize];
    let mut acc = CompensatedSum::<T>::new();
    for _ in 0..total {
        let lo = *idx.iter().min().unwrap();
        let hi = *idx.iter().max().unwrap();
        if exact_cmp(d[lo], d[hi]) == Ordering::Greater {
            acc.add(logs[lo] + T::one() - logs[hi]);
        }
        // odometer increment
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < d.len() {
                break;
            }
            *slot = 0;
        }
    }
    Ok(acc.value())
}

/// `#{(d_1..d_b) : d_i | n, d_max < e·d_min}`, counted per minimum element:
/// if `w` divisors lie in `[d, e·d)` then `w^b − (w−1)^b` tuples have minimum `d`.
pub fn window_tuple_count(divs: &DivisorList, b: u32) -> BigUint {
    let d = divs.as_slice();
    let mut hi = 0usize;
    let mut total = BigUint::zero();
    for (i, &lo) in d.iter().enumerate() {
        hi = hi.max(i);
        while hi + 1 < d.len() && e_times_gt(lo, d[hi + 1]) {
            hi += 1;
        }
        let w = (hi - i + 1) as u64;
        total += WideInt::pow(w, b).into_big() - WideInt::pow(w - 1, b).into_big();
    }
    total
}

/// Relative residual of `M_q(pn) = 2M_q(n) + Σ_{1≤b≤q−1} C(q,b) ∫ Δ(n;u)^{q−b} Δ(n;u−log p)^b du`.
pub fn verify_recursion<T: Real>(n: &Factorization, p: u64, q: u32) -> Result<T> {
    check_order("q", q)?;
    let np = n.times_prime(p)?;
    let prof_n: StepFunction<T> = delta_profile(&n.divisors());
    let prof_np: StepFunction<T> = delta_profile(&np.divisors());
    let lhs = moment(&prof_np, q)?;
    let shift = T::of(p).ln();
    let mut rhs = CompensatedSum::<T>::new();
    rhs.add(T::of(2) * moment(&prof_n, q)?);
    for b in 1..q {
        let a = q - b;
        rhs.add(binomial::<T>(q, b) * cross_correlation(&prof_n, shift, a, b)?);
    }
    Ok((lhs - rhs.value()).abs() / lhs)
}

pub fn binomial<T: Real>(n: u32, k: u32) -> T {
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    T::of(acc)
}

/// Outcome of the two pointwise inequalities for one `n` and one order.
#[derive(Debug, Clone)]
pub struct PointwiseReport<T> {
    pub n: u64,
    pub q: u32,
    pub delta: u64,
    pub moment: T,
    /// `Δ(n)^q ≤ 2^q M_q(n)`.
    pub delta_power_ok: bool,
    pub tuple_count: BigUint,
    /// `#{q-tuples with d_max < e·d_min} ≤ 2^q M_q(n)`.
    pub tuple_count_ok: bool,
}

impl<T> PointwiseReport<T> {
    pub fn holds(&self) -> bool {
        self.delta_power_ok && self.tuple_count_ok
    }
}

/// Relative slack granted to the float side of the pointwise comparisons;
/// it is the accuracy contract of [`moment`].
pub const MOMENT_REL_TOL: f64 = 1e-12;

pub fn verify_pointwise_bounds<T: Real>(divs: &DivisorList, q: u32) -> Result<PointwiseReport<T>> {
    check_order("q", q)?;
    let profile: StepFunction<T> = delta_profile(divs);
    let m = moment(&profile, q)?;
    let delta = delta_of_sorted(divs.as_slice());
    let rhs = T::of(2).powi(q as i32) * m * (T::one() + T::of(MOMENT_REL_TOL));
    let tuple_count = window_tuple_count(divs, q);
    Ok(PointwiseReport {
        n: divs.n(),
        q,
        delta,
        moment: m,
        delta_power_ok: WideInt::pow(delta, q).to_real::<T>() <= rhs,
        tuple_count_ok: T::of_big(&tuple_count) <= rhs,
        tuple_count,
    })
}

/// `M_1..=M_{q_max}` for one `n`.
#[derive(Debug, Clone)]
pub struct MomentTable<T> {
    pub n: u64,
    pub tau: u64,
    pub delta: u64,
    /// Measure of `{u : Δ(n;u) > 0}`.
    pub support: T,
    entries: Vec<T>,
}

impl<T: Real> MomentTable<T> {
    pub fn new(divs: &DivisorList, q_max: u32) -> Result<Self> {
        check_order("q_max", q_max)?;
        let profile: StepFunction<T> = delta_profile(divs);
        Self::from_profile(divs.n(), divs.tau() as u64, &profile, q_max)
    }

    pub fn from_profile(n: u64, tau: u64, profile: &StepFunction<T>, q_max: u32) -> Result<Self> {
        check_order("q_max", q_max)?;
        let entries = (1..=q_max).map(|q| profile.integrate_power(q)).collect();
        let support = profile.iter().filter(|&(_, _, v)| v > 0).map(|(a, b, _)| b - a).sum();
        Ok(Self { n, tau, delta: profile.max_value(), support, entries })
    }

    pub fn q_max(&self) -> u32 {
        self.entries.len() as u32
    }

    /// `M_q(n)` for `1 ≤ q ≤ q_max`.
    pub fn get(&self, q: u32) -> Option<T> {
        q.checked_sub(1).and_then(|i| self.entries.get(i as usize)).copied()
    }

    /// `M_q(n)^{1/q}` for every stored order.
    pub fn power_means(&self) -> Vec<T> {
        self.entries.iter().enumerate().map(|(i, &m)| m.powf(T::one() / T::of(i + 1))).collect()
    }

    /// Whether `q ↦ M_q(n)^{1/q}` is nondecreasing (to relative `tol`).
    /// This fails for every `n ≥ 2` because the support has measure above 1;
    /// it is a reported statistic, not an invariant.
    pub fn power_means_nondecreasing(&self, tol: T) -> bool {
        nondecreasing(&self.power_means(), tol)
    }

    /// `(M_q(n)/|supp|)^{1/q}`: power means of `Δ(n;·)` under the uniform
    /// probability measure on its support.
    pub fn normalized_power_means(&self) -> Vec<T> {
        self.entries.iter().enumerate().map(|(i, &m)| (m / self.support).powf(T::one() / T::of(i + 1))).collect()
    }

    /// Always true up to rounding (power-mean inequality).
    pub fn normalized_power_means_nondecreasing(&self, tol: T) -> bool {
        nondecreasing(&self.normalized_power_means(), tol)
    }
}

fn nondecreasing<T: Real>(v: &[T], tol: T) -> bool {
    v.windows(2).all(|w| w[1] >= w[0] * (T::one() - tol))
}
