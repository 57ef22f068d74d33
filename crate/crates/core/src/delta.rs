//! The window profile `Δ(n;u) = #{d | n : e^u < d ≤ e^{u+1}}` and its maximum `Δ(n)`.
//!
//! Divisor `d` is counted exactly for `u ∈ [log d − 1, log d)`. All orderings
//! between breakpoints reduce to comparisons `e·d' ≷ d`, which are decided by
//! [`crate::econst`]; the `f64`/`f32` breakpoints are only ever stored, never
//! compared to derive a count.

use std::cmp::Ordering;

use crate::arith::DivisorList;
use crate::econst::{e_times_gt, exact_cmp};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::step::StepFunction;

/// Default bound on `τ(n)` for the quadratic [`delta_oracle`].
pub const DEFAULT_ORACLE_TAU: usize = 10_000;

/// An anchored window `(anchor/e, anchor]` and the number of divisors it holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowCount {
    pub anchor_divisor: u64,
    pub count: u64,
}

/// The anchored window with the most divisors (the first one on ties).
pub fn best_window(divs: &[u64]) -> WindowCount {
    let mut best = WindowCount { anchor_divisor: divs[0], count: 0 };
    let mut lo = 0usize;
    for (j, &d) in divs.iter().enumerate() {
        // drop divisors ≤ d/e, i.e. with e·divs[lo] ≤ d
        while !e_times_gt(divs[lo], d) {
            lo += 1;
        }
        let count = (j - lo + 1) as u64;
        if count > best.count {
            best = WindowCount { anchor_divisor: d, count };
        }
    }
    best
}

/// `Δ(n)` from an ascending divisor slice, by a two-pointer sweep.
pub fn delta_of_sorted(divs: &[u64]) -> u64 {
    let mut best = 0usize;
    let mut lo = 0usize;
    for (j, &d) in divs.iter().enumerate() {
        while !e_times_gt(divs[lo], d) {
            lo += 1;
        }
        best = best.max(j - lo + 1);
    }
    best as u64
}

pub fn delta(divs: &DivisorList) -> u64 {
    delta_of_sorted(divs.as_slice())
}

/// `Δ(n)` by scanning every anchored window in full, with exact rational
/// comparisons only. Independent of [`delta`]'s sweep and float fast path.
pub fn delta_oracle(divs: &DivisorList, max_tau: usize) -> Result<u64> {
    let d = divs.as_slice();
    if d.len() > max_tau {
        return Err(Error::GuardExceeded(format!("τ({}) = {} exceeds oracle bound {max_tau}", divs.n(), d.len())));
    }
    let mut best = 0;
    for &anchor in d {
        let count = d
            .iter()
            .filter(|&&other| other <= anchor && exact_cmp(other, anchor) == Ordering::Greater)
            .count() as u64;
        best = best.max(count);
    }
    Ok(best)
}

/// The step function `u ↦ Δ(n;u)`.
///
/// Start events at `log d − 1` and end events at `log d` are each already
/// ascending in `d`; merging them needs `log d_s − 1 < log d_e ⇔ d_s < e·d_e`.
pub fn delta_profile<T: Real>(divs: &DivisorList) -> StepFunction<T> {
    let d = divs.as_slice();
    let m = d.len();
    let mut breakpoints: Vec<T> = Vec::with_capacity(2 * m);
    let mut values: Vec<u64> = Vec::with_capacity(2 * m);
    let (mut s, mut e) = (0usize, 0usize);
    let mut level = 0u64;
    while e < m {
        let start_first = s < m && e_times_gt(d[e], d[s]);
        if start_first {
            breakpoints.push(T::of(d[s]).ln() - T::one());
            level += 1;
            s += 1;
        } else {
            breakpoints.push(T::of(d[e]).ln());
            level -= 1;
            e += 1;
        }
        values.push(level);
    }
    values.pop();
    StepFunction::from_pieces(breakpoints, values).expect("event merge yields ascending breakpoints")
}
