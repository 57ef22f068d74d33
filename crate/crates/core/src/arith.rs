//! Factorization, divisor enumeration, smooth parts and prime sums.
//!
//! Everything here rests on a smallest-prime-factor table ([`SpfSieve`]),
//! which also serves as the prime enumerator for the Euler products and
//! reciprocal prime sums.

use crate::error::{Error, Result};
use crate::num::{CompensatedSum, Real};

/// Bytes per sieve entry; the table is `limit + 1` little `u32` words.
pub const SPF_BYTES_PER_ENTRY: usize = 4;

/// Smallest prime factor table for `2 ≤ m ≤ limit`, plus the ascending prime list.
///
/// Immutable after construction and `Sync`, so one instance can be shared
/// across worker threads.
#[derive(Debug, Clone)]
pub struct SpfSieve {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl SpfSieve {
    /// Linear sieve up to `limit` inclusive.
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Err(Error::InvalidArgument(format!("sieve limit must be at least 2, got {limit}")));
        }
        if limit >= u32::MAX as u64 {
            return Err(Error::out_of_range("sieve limit", limit, format!("[2, {})", u32::MAX)));
        }
        let len = limit as usize + 1;
        let mut spf: Vec<u32> = Vec::new();
        spf.try_reserve_exact(len).map_err(|e| {
            Error::Resource(format!("cannot allocate {} bytes for the sieve: {e}", len * SPF_BYTES_PER_ENTRY))
        })?;
        spf.resize(len, 0);
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..len {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let m = i * p as usize;
                if p > si || m >= len {
                    break;
                }
                spf[m] = p;
            }
        }
        Ok(Self { limit, spf, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `m`, for `2 ≤ m ≤ limit`.
    pub fn spf(&self, m: u64) -> Option<u64> {
        if m < 2 || m > self.limit {
            None
        } else {
            Some(self.spf[m as usize] as u64)
        }
    }

    pub fn is_prime(&self, m: u64) -> bool {
        self.spf(m) == Some(m)
    }

    /// All primes `≤ limit`, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 {
            return Err(Error::InvalidArgument("cannot factorize 0".into()));
        }
        if n > self.limit {
            return Err(Error::out_of_range("n", n, format!("[1, {}]", self.limit)));
        }
        let mut factors: Vec<(u64, u32)> = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        Ok(Factorization { n, factors })
    }

    /// Primes `p` with `lo ≤ p < hi` as a slice; `hi` must not exceed `limit + 1`.
    fn prime_range<T: Real>(&self, lo: T, hi_exclusive: impl Fn(u64) -> bool) -> &[u32] {
        let start = self.primes.partition_point(|&p| T::of(p) < lo);
        let end = self.primes.partition_point(|&p| hi_exclusive(p as u64));
        if end <= start {
            &[]
        } else {
            &self.primes[start..end]
        }
    }

    fn check_covers<T: Real>(&self, what: &'static str, bound: T) -> Result<()> {
        // every integer strictly below `bound` must be covered by the table
        if bound > T::of(self.limit + 1) {
            return Err(Error::out_of_range(what, bound, format!("at most {} (sieve limit + 1)", self.limit + 1)));
        }
        Ok(())
    }
}

/// Prime-power decomposition `n = Π p^e` with strictly ascending primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Builds a factorization from `(prime, exponent)` pairs, checking the invariants
    /// that can be checked cheaply (ascending bases, positive exponents, no overflow).
    /// Primality of the bases is the caller's responsibility.
    pub fn from_prime_powers(factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut n: u64 = 1;
        let mut prev = 1;
        for &(p, e) in &factors {
            if p <= prev || e == 0 {
                return Err(Error::InvalidArgument(format!("bad factor list {factors:?}")));
            }
            prev = p;
            n = p
                .checked_pow(e)
                .and_then(|pe| n.checked_mul(pe))
                .ok_or_else(|| Error::InvalidArgument("product overflows u64".into()))?;
        }
        Ok(Self { n, factors })
    }

    /// Squarefree number from ascending distinct primes.
    pub fn squarefree(primes: &[u64]) -> Result<Self> {
        Self::from_prime_powers(primes.iter().map(|&p| (p, 1)).collect())
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn tau(&self) -> u64 {
        self.factors.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// `P⁻(n)`; `None` stands for the convention `P⁻(1) = +∞`.
    pub fn least_prime_factor(&self) -> Option<u64> {
        self.factors.first().map(|&(p, _)| p)
    }

    pub fn divides_by(&self, p: u64) -> bool {
        self.factors.iter().any(|&(q, _)| q == p)
    }

    /// `n_{<y}`: the part of `n` built from primes strictly below `y`.
    pub fn smooth_part<T: Real>(&self, y: T) -> Factorization {
        let factors: Vec<_> = self.factors.iter().copied().filter(|&(p, _)| T::of(p) < y).collect();
        let n = factors.iter().map(|&(p, e)| p.pow(e)).product();
        Factorization { n, factors }
    }

    /// `(n_{<y}, n_{≥y})`.
    pub fn split_at<T: Real>(&self, y: T) -> (Factorization, Factorization) {
        let smooth = self.smooth_part(y);
        let factors: Vec<_> = self.factors.iter().copied().filter(|&(p, _)| T::of(p) >= y).collect();
        let rough = Factorization { n: self.n / smooth.n, factors };
        (smooth, rough)
    }

    /// `n · p` for a prime `p` not dividing `n`.
    pub fn times_prime(&self, p: u64) -> Result<Factorization> {
        if self.divides_by(p) {
            return Err(Error::InvalidArgument(format!("{p} already divides {}", self.n)));
        }
        let n = self
            .n
            .checked_mul(p)
            .ok_or_else(|| Error::InvalidArgument("product overflows u64".into()))?;
        let mut factors = self.factors.clone();
        let at = factors.partition_point(|&(q, _)| q < p);
        factors.insert(at, (p, 1));
        Ok(Factorization { n, factors })
    }

    pub fn divisors(&self) -> DivisorList {
        let mut divs = Vec::with_capacity(self.tau() as usize);
        divs.push(1u64);
        for &(p, e) in &self.factors {
            let base_len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..base_len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        DivisorList { n: self.n, divisors: divs }
    }
}

/// Ascending divisors of `n`, starting at 1 and ending at `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorList {
    n: u64,
    divisors: Vec<u64>,
}

impl DivisorList {
    /// Wraps an already sorted, complete divisor list. Checked in debug builds.
    pub fn from_sorted(n: u64, divisors: Vec<u64>) -> Self {
        debug_assert!(divisors.first() == Some(&1) && divisors.last() == Some(&n));
        debug_assert!(divisors.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(divisors.iter().all(|d| n.is_multiple_of(*d)));
        Self { n, divisors }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.divisors
    }

    pub fn tau(&self) -> usize {
        self.divisors.len()
    }
}

/// `Π_{y ≤ p < x} (1 + 2^k / p)`, accumulated as a compensated sum of `log1p` terms.
pub fn euler_product<T: Real>(sieve: &SpfSieve, y: T, x: T, k: u32) -> Result<T> {
    if y < T::one() || x < y {
        return Err(Error::InvalidArgument(format!("need 1 ≤ y ≤ x, got y = {y}, x = {x}")));
    }
    sieve.check_covers("x", x)?;
    let weight = T::of(2u64.pow(k));
    let acc: CompensatedSum<T> = sieve
        .prime_range(y, |p| T::of(p) < x)
        .iter()
        .map(|&p| (weight / T::of(p)).ln_1p())
        .collect();
    Ok(acc.value().exp())
}

/// `Σ_{y ≤ p ≤ z} 1/p`.
pub fn prime_recip_sum<T: Real>(sieve: &SpfSieve, y: T, z: T) -> Result<T> {
    if y < T::one() || z < y {
        return Err(Error::InvalidArgument(format!("need 1 ≤ y ≤ z, got y = {y}, z = {z}")));
    }
    if z >= T::of(sieve.limit() + 1) {
        return Err(Error::out_of_range("z", z, format!("below {} (sieve limit + 1)", sieve.limit() + 1)));
    }
    let acc: CompensatedSum<T> = sieve
        .prime_range(y, |p| T::of(p) <= z)
        .iter()
        .map(|&p| T::one() / T::of(p))
        .collect();
    Ok(acc.value())
}
