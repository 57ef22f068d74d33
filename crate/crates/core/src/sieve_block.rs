//! Segmented divisor sieve: ascending divisor lists for every `n` in `[lo, hi)`.

use crate::arith::DivisorList;
use crate::error::{Error, Result};

/// Default cap on stored small-divisor slots per block (4 bytes each).
pub const DEFAULT_SLOT_BUDGET: usize = 1 << 28;

/// Divisors of each `n ∈ [lo, hi)`.
///
/// Only the divisors `d ≤ √n` are stored (in `u32`, since `√n < 2^32`), in
/// ascending order as produced by the marking pass; the full list is their
/// concatenation with the reversed cofactors `n/d`.
#[derive(Debug, Clone)]
pub struct SieveBlock {
    lo: u64,
    hi: u64,
    offsets: Vec<usize>,
    small: Vec<u32>,
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl SieveBlock {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        Self::with_budget(lo, hi, DEFAULT_SLOT_BUDGET)
    }

    /// Marks multiples of each `d ≤ √(hi−1)`, starting at `max(d², lo)`; work is
    /// `Σ_{d ≤ √hi} ((hi−lo)/d + 1)`.
    pub fn with_budget(lo: u64, hi: u64, max_slots: usize) -> Result<Self> {
        if lo < 1 || hi <= lo {
            return Err(Error::InvalidArgument(format!("need 1 ≤ lo < hi, got [{lo}, {hi})")));
        }
        if hi > 1 << 62 {
            return Err(Error::out_of_range("hi", hi, "at most 2^62"));
        }
        let width = (hi - lo) as usize;
        let root = isqrt(hi - 1);
        // harmonic estimate of Σ_{d≤root} (width/d + 1)
        let estimate = (width as f64 * ((root as f64).ln() + 1.0) + root as f64) as usize;
        if estimate > max_slots.saturating_mul(2) {
            return Err(Error::Resource(format!(
                "block [{lo}, {hi}) needs about {estimate} divisor slots, budget is {max_slots}"
            )));
        }

        let first_multiple = |d: u64| -> u64 {
            let sq = d * d;
            if sq >= lo {
                sq
            } else {
                lo.div_ceil(d) * d
            }
        };

        let mut counts = vec![0usize; width + 1];
        for d in 1..=root {
            let mut m = first_multiple(d);
            while m < hi {
                counts[(m - lo) as usize + 1] += 1;
                m += d;
            }
        }
        for i in 1..=width {
            counts[i] += counts[i - 1];
        }
        let total = counts[width];
        if total > max_slots {
            return Err(Error::Resource(format!("block [{lo}, {hi}) needs {total} divisor slots, budget is {max_slots}")));
        }
        let offsets = counts;
        let mut small: Vec<u32> = Vec::new();
        small
            .try_reserve_exact(total)
            .map_err(|e| Error::Resource(format!("cannot allocate {total} divisor slots: {e}")))?;
        small.resize(total, 0);
        let mut fill = offsets.clone();
        for d in 1..=root {
            let mut m = first_multiple(d);
            while m < hi {
                let i = (m - lo) as usize;
                small[fill[i]] = d as u32;
                fill[i] += 1;
                m += d;
            }
        }
        Ok(Self { lo, hi, offsets, small })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Divisors `d ≤ √n` of `n`, ascending.
    pub fn small_divisors(&self, n: u64) -> &[u32] {
        assert!((self.lo..self.hi).contains(&n), "{n} outside [{}, {})", self.lo, self.hi);
        let i = (n - self.lo) as usize;
        &self.small[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Writes the full ascending divisor list of `n` into `buf`.
    pub fn divisors_into(&self, n: u64, buf: &mut Vec<u64>) {
        let small = self.small_divisors(n);
        buf.clear();
        buf.extend(small.iter().map(|&d| d as u64));
        let mut rest = small.iter().rev().map(|&d| n / d as u64);
        if let Some(&last) = small.last() {
            if (last as u64) * (last as u64) == n {
                rest.next();
            }
        }
        buf.extend(rest);
    }

    pub fn divisor_list(&self, n: u64) -> DivisorList {
        let mut buf = Vec::new();
        self.divisors_into(n, &mut buf);
        DivisorList::from_sorted(n, buf)
    }

    /// Folds `f(n, divisors)` over the block in ascending `n`.
    pub fn fold<A>(&self, init: A, mut f: impl FnMut(A, u64, &[u64]) -> A) -> A {
        let mut buf = Vec::with_capacity(64);
        let mut acc = init;
        for n in self.lo..self.hi {
            self.divisors_into(n, &mut buf);
            acc = f(acc, n, &buf);
        }
        acc
    }
}
