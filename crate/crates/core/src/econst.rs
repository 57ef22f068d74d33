//! Certified comparisons of `e·a` against `b` for integers `a`, `b`.
//!
//! A divisor `d'` lies in the window `(d/e, d]` iff `e·d' > d`. Since `e` is
//! irrational the comparison never ties, but for large operands a double
//! precision product is not provably on the right side. The comparison is
//! staged: a guarded `f64` test, then a rational enclosure of `e` from two
//! consecutive continued-fraction convergents held in `u128`, then ever
//! deeper convergents in arbitrary precision.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::BigUint;

/// Convergents `p_k / q_k` of `e = [2; 1, 2, 1, 1, 4, 1, 1, 6, ...]`.
fn partial_quotient(k: usize) -> u64 {
    if k == 0 {
        2
    } else if k % 3 == 2 {
        2 * (k as u64 + 1) / 3
    } else {
        1
    }
}

/// Rational enclosure `lo < e < hi` with numerators and denominators below 2^76.
#[derive(Debug, Clone, Copy)]
pub struct SmallEnclosure {
    pub lo: (u128, u128),
    pub hi: (u128, u128),
}

#[derive(Debug, Clone)]
pub struct BigEnclosure {
    pub lo: (BigUint, BigUint),
    pub hi: (BigUint, BigUint),
}

/// Convergent pairs `(p, q)` starting at k = 0.
fn convergents() -> impl Iterator<Item = (BigUint, BigUint)> {
    let mut prev = (BigUint::from(1u32), BigUint::from(0u32));
    let mut cur: Option<(BigUint, BigUint)> = None;
    let mut k = 0usize;
    std::iter::from_fn(move || {
        let a = BigUint::from(partial_quotient(k));
        let next = match &cur {
            None => (a.clone(), BigUint::from(1u32)),
            Some((p, q)) => {
                let n = (&a * p + &prev.0, &a * q + &prev.1);
                prev = (p.clone(), q.clone());
                n
            }
        };
        cur = Some(next.clone());
        k += 1;
        Some(next)
    })
}

/// Pair of consecutive convergents; even-indexed ones lie below `e`, odd ones above.
fn enclosure_at(k: usize) -> BigEnclosure {
    let c: Vec<_> = convergents().take(k + 2).collect();
    let (a, b) = (c[k].clone(), c[k + 1].clone());
    if k.is_multiple_of(2) {
        BigEnclosure { lo: a, hi: b }
    } else {
        BigEnclosure { lo: b, hi: a }
    }
}

fn small_enclosure() -> &'static SmallEnclosure {
    static CELL: OnceLock<SmallEnclosure> = OnceLock::new();
    CELL.get_or_init(|| {
        let limit = BigUint::from(1u128 << 76);
        let mut best = None;
        for k in 0.. {
            let enc = enclosure_at(k);
            if enc.lo.0 >= limit || enc.hi.0 >= limit {
                break;
            }
            best = Some(enc);
        }
        let enc = best.expect("at least one convergent pair fits");
        let conv = |v: &BigUint| -> u128 { u128::try_from(v.clone()).expect("fits in u128") };
        SmallEnclosure { lo: (conv(&enc.lo.0), conv(&enc.lo.1)), hi: (conv(&enc.hi.0), conv(&enc.hi.1)) }
    })
}

/// The `u128` enclosure used by the exact path. Width about 3e-44.
pub fn enclosure() -> SmallEnclosure {
    *small_enclosure()
}

/// Deeper enclosure for the arbitrary-precision fallback; `depth` convergents in.
pub fn deep_enclosure(depth: usize) -> BigEnclosure {
    enclosure_at(depth)
}

const F64_EXACT: u64 = 1 << 53;
// |fl(E·a) − e·a| ≤ 3·2^-53·e·a; the band is a comfortable multiple of that.
const F64_BAND: f64 = 1e-14;

/// `e·a > b`, using the float fast path when it is decisive.
#[inline]
pub fn e_times_gt(a: u64, b: u64) -> bool {
    if a < F64_EXACT && b < F64_EXACT {
        let af = a as f64;
        let prod = std::f64::consts::E * af;
        let diff = prod - b as f64;
        let band = F64_BAND * prod + f64::MIN_POSITIVE;
        if diff > band {
            return true;
        }
        if diff < -band {
            return false;
        }
    }
    exact_cmp(a, b) == Ordering::Greater
}

/// Sign of `e·a − b` decided without floating point. Never `Equal` unless `a = b = 0`.
pub fn exact_cmp(a: u64, b: u64) -> Ordering {
    if a == 0 && b == 0 {
        return Ordering::Equal;
    }
    let enc = small_enclosure();
    let (a, b) = (a as u128, b as u128);
    // p, q < 2^76, so the products fit in u128 for operands below 2^51
    if a < (1 << 51) && b < (1 << 51) {
        if a * enc.lo.0 > b * enc.lo.1 {
            return Ordering::Greater;
        }
        if a * enc.hi.0 < b * enc.hi.1 {
            return Ordering::Less;
        }
    }
    big_cmp(a, b)
}

fn big_cmp(a: u128, b: u128) -> Ordering {
    let (a, b) = (BigUint::from(a), BigUint::from(b));
    let mut depth = 40;
    loop {
        let enc = deep_enclosure(depth);
        if &a * &enc.lo.0 > &b * &enc.lo.1 {
            return Ordering::Greater;
        }
        if &a * &enc.hi.0 < &b * &enc.hi.1 {
            return Ordering::Less;
        }
        depth *= 2;
    }
}
