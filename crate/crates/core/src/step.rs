//! Right-continuous piecewise constant functions with finite support.

use crate::error::{Error, Result};
use crate::num::{CompensatedSum, Real, WideInt};

/// `u ↦ values[i]` on `[breakpoints[i], breakpoints[i+1])`, zero outside
/// `[breakpoints[0], breakpoints[m])`.
///
/// Breakpoints are strictly ascending and consecutive values differ, so the
/// representation is canonical. An empty function has no breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<T> {
    breakpoints: Vec<T>,
    values: Vec<u64>,
}

impl<T: Real> StepFunction<T> {
    pub fn zero() -> Self {
        Self { breakpoints: Vec::new(), values: Vec::new() }
    }

    /// Builds a canonical step function from a breakpoint list and the values
    /// between consecutive breakpoints. Zero-width pieces (possible when two
    /// distinct real breakpoints round to the same `T`) and repeated values are
    /// merged away; leading and trailing zero pieces are trimmed.
    pub fn from_pieces(breakpoints: Vec<T>, values: Vec<u64>) -> Result<Self> {
        if breakpoints.is_empty() && values.is_empty() {
            return Ok(Self::zero());
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] <= w[1])) || breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidArgument("breakpoints must be finite and ascending".into()));
        }
        let mut bps: Vec<T> = Vec::with_capacity(breakpoints.len());
        let mut vals: Vec<u64> = Vec::with_capacity(values.len());
        for (i, &v) in values.iter().enumerate() {
            let (lo, hi) = (breakpoints[i], breakpoints[i + 1]);
            if lo == hi {
                continue;
            }
            match (bps.last(), vals.last()) {
                (Some(_), Some(&last)) if last == v => {
                    *bps.last_mut().unwrap() = hi;
                }
                (None, _) => {
                    if v == 0 {
                        continue;
                    }
                    bps.push(lo);
                    bps.push(hi);
                    vals.push(v);
                }
                _ => {
                    bps.push(hi);
                    vals.push(v);
                }
            }
        }
        while vals.last() == Some(&0) {
            vals.pop();
            bps.pop();
        }
        if vals.is_empty() {
            bps.clear();
        }
        Ok(Self { breakpoints: bps, values: vals })
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn pieces(&self) -> usize {
        self.values.len()
    }

    /// `(start, end, value)` for every piece.
    pub fn iter(&self) -> impl Iterator<Item = (T, T, u64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.breakpoints[i], self.breakpoints[i + 1], v))
    }

    pub fn max_value(&self) -> u64 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    pub fn eval(&self, u: T) -> u64 {
        // index of the last breakpoint ≤ u
        let k = self.breakpoints.partition_point(|&b| b <= u);
        if k == 0 || k > self.values.len() {
            0
        } else {
            self.values[k - 1]
        }
    }

    /// Midpoints of all pieces, the probe points for pointwise identities.
    pub fn midpoints(&self) -> impl Iterator<Item = T> + '_ {
        let half = T::of(0.5);
        self.breakpoints.windows(2).map(move |w| (w[0] + w[1]) * half)
    }

    /// The same function moved right by `shift`: `u ↦ f(u − shift)`.
    pub fn shifted(&self, shift: T) -> Self {
        Self { breakpoints: self.breakpoints.iter().map(|&b| b + shift).collect(), values: self.values.clone() }
    }

    /// `∫ f(u)^q du`, with `v^q` formed exactly in integers and only the piece
    /// lengths carrying rounding error.
    pub fn integrate_power(&self, q: u32) -> T {
        let acc: CompensatedSum<T> = self
            .iter()
            .map(|(lo, hi, v)| WideInt::pow(v, q).to_real::<T>() * (hi - lo))
            .collect();
        acc.value()
    }

    /// `∫ f(u)^a g(u)^b du` over the merged breakpoints of `f` and `g`.
    pub fn integrate_product(&self, a: u32, other: &Self, b: u32) -> T {
        let mut acc = CompensatedSum::<T>::new();
        let (fb, gb) = (&self.breakpoints, &other.breakpoints);
        if fb.is_empty() || gb.is_empty() {
            return T::zero();
        }
        let start = fb[0].max(gb[0]);
        let end = fb[fb.len() - 1].min(gb[gb.len() - 1]);
        if !(start < end) {
            return T::zero();
        }
        // piece indices: f is on piece i while fb[i] ≤ u < fb[i+1]
        let mut i = fb.partition_point(|&x| x <= start) - 1;
        let mut j = gb.partition_point(|&x| x <= start) - 1;
        let mut u = start;
        while u < end {
            let next = fb[i + 1].min(gb[j + 1]).min(end);
            let (fv, gv) = (self.values[i], other.values[j]);
            if fv != 0 && gv != 0 && next > u {
                let w = WideInt::pow(fv, a).times(WideInt::pow(gv, b));
                acc.add(w.to_real::<T>() * (next - u));
            }
            if fb[i + 1] <= next {
                i += 1;
            }
            if gb[j + 1] <= next {
                j += 1;
            }
            u = next;
            if i >= self.values.len() || j >= other.values.len() {
                break;
            }
        }
        acc.value()
    }
}
