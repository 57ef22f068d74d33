//! Exact, parallel, checkpointed partial sums `Σ_{n≤x} Δ(n)`, plus the
//! logarithmically weighted sums over squarefree smooth numbers and growth fits.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{Factorization, SpfSieve};
use crate::checkpoint::Checkpoint;
use crate::delta::{delta, delta_of_sorted};
use crate::error::{Error, Result};
use crate::levelset::{walk_squarefree, TruncatedSum};
use crate::num::{log2_floor, log_floor, CompensatedSum, Real};
use crate::sieve_block::SieveBlock;

pub const DEFAULT_BLOCK_SIZE: u64 = 1 << 20;

/// One row of a survey: the exact partial sum at `x` and derived statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub x: u64,
    #[serde(with = "u128_decimal")]
    pub sum_delta: u128,
    pub mean_delta: f64,
    pub mean_over_log2: f64,
    pub elapsed_s: f64,
    pub threads: usize,
    pub checkpoint_id: String,
}

mod u128_decimal {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl SurveyRecord {
    pub fn new(x: u64, sum_delta: u128, elapsed_s: f64, threads: usize, checkpoint_id: String) -> Self {
        let mean = sum_delta as f64 / x as f64;
        Self {
            x,
            sum_delta,
            mean_delta: mean,
            mean_over_log2: mean / log2_floor(x as f64),
            elapsed_s,
            threads,
            checkpoint_id,
        }
    }

    /// `x ≤ Σ Δ ≤ x(1 + log x)`, from `1 ≤ Δ ≤ τ` and `Σ_{n≤x} τ(n) ≤ x(1 + log x)`.
    pub fn within_trivial_bounds(&self) -> bool {
        let x = self.x as f64;
        self.sum_delta >= self.x as u128 && (self.sum_delta as f64) <= x * (1.0 + x.ln())
    }
}

#[derive(Debug, Clone)]
pub struct SurveyOptions {
    pub block_size: u64,
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    /// Stop (with [`Error::Interrupted`]) after this many newly computed blocks.
    pub stop_after_blocks: Option<usize>,
}

impl Default for SurveyOptions {
    fn default() -> Self {
        Self { block_size: DEFAULT_BLOCK_SIZE, workers: default_workers(), checkpoint: None, stop_after_blocks: None }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// `Σ_{lo ≤ n < hi} Δ(n)` from one sieved block.
pub fn block_delta_sum(lo: u64, hi: u64) -> Result<u128> {
    let block = SieveBlock::new(lo, hi)?;
    Ok(block.fold(0u128, |acc, _, divs| acc + delta_of_sorted(divs) as u128))
}

/// Block boundaries covering `[1, max(xs)]`, cut at every `x + 1` so that each
/// prefix sum is a whole number of blocks.
pub fn plan_blocks(xs: &[u64], block_size: u64) -> Vec<(u64, u64)> {
    let mut blocks = Vec::new();
    let mut lo = 1u64;
    for &x in xs {
        let end = x + 1;
        while lo < end {
            let hi = (lo + block_size).min(end);
            blocks.push((lo, hi));
            lo = hi;
        }
    }
    blocks
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Resource(format!("cannot start {workers} workers: {e}")))
}

/// Exact partial sums at every `x` in `xs`, one record each, in ascending `x`.
///
/// The result does not depend on `workers` or `block_size`. With a checkpoint
/// path, every finished block is persisted before the next result is
/// reported, and blocks already present in the file are not recomputed.
pub fn survey(xs: &[u64], opts: &SurveyOptions) -> Result<Vec<SurveyRecord>> {
    if opts.workers == 0 {
        return Err(Error::InvalidArgument("workers must be at least 1".into()));
    }
    if opts.block_size == 0 {
        return Err(Error::InvalidArgument("block_size must be at least 1".into()));
    }
    let mut xs: Vec<u64> = xs.to_vec();
    xs.sort_unstable();
    xs.dedup();
    if xs.first().is_none_or(|&x| x == 0) {
        return Err(Error::InvalidArgument("survey needs at least one x ≥ 1".into()));
    }

    let plan = plan_blocks(&xs, opts.block_size);
    let mut state = match &opts.checkpoint {
        Some(path) => Checkpoint::load(path)?,
        None => Checkpoint::default(),
    };
    if let Some(path) = &opts.checkpoint {
        if let Some(&(lo, hi)) = state.blocks.keys().find(|k| plan.binary_search(k).is_err()) {
            return Err(Error::CorruptCheckpoint {
                path: path.clone(),
                line: 0,
                reason: format!("block [{lo}, {hi}) does not belong to this survey (x = {xs:?}, block size {})", opts.block_size),
            });
        }
    }
    // records are recomputed on every run
    state.records.clear();

    let pool = pool(opts.workers)?;
    let shared = Mutex::new(state);
    let fresh = AtomicUsize::new(0);
    let ckpt_name = opts
        .checkpoint
        .as_ref()
        .and_then(|p| p.file_name())
        .map(|n| n.to_string_lossy().into_owned());
    let started = Instant::now();
    let mut records = Vec::with_capacity(xs.len());
    let mut running: u128 = 0;
    let mut seg_start = 0usize;

    for &x in &xs {
        let seg_end = plan.partition_point(|&(_, hi)| hi <= x + 1);
        let segment = &plan[seg_start..seg_end];
        seg_start = seg_end;

        let results: Vec<Result<Option<u128>>> = pool.install(|| {
            segment
                .par_iter()
                .map(|&(lo, hi)| {
                    if let Some(&sum) = shared.lock().unwrap().blocks.get(&(lo, hi)) {
                        return Ok(Some(sum));
                    }
                    if let Some(limit) = opts.stop_after_blocks {
                        if fresh.load(Ordering::SeqCst) >= limit {
                            return Ok(None);
                        }
                    }
                    let sum = block_delta_sum(lo, hi)?;
                    let mut st = shared.lock().unwrap();
                    if let Some(limit) = opts.stop_after_blocks {
                        if fresh.load(Ordering::SeqCst) >= limit {
                            return Ok(None);
                        }
                    }
                    st.blocks.insert((lo, hi), sum);
                    if let Some(path) = &opts.checkpoint {
                        st.store(path)?;
                    }
                    fresh.fetch_add(1, Ordering::SeqCst);
                    Ok(Some(sum))
                })
                .collect()
        });
        let mut complete = true;
        for r in results {
            match r? {
                Some(s) => running += s,
                None => complete = false,
            }
        }
        if !complete {
            return Err(Error::Interrupted { completed_blocks: fresh.load(Ordering::SeqCst) });
        }

        let id = match &ckpt_name {
            Some(name) => format!("{name}:{}", shared.lock().unwrap().blocks.len()),
            None => "-".to_string(),
        };
        let rec = SurveyRecord::new(x, running, started.elapsed().as_secs_f64(), opts.workers, id);
        if let Some(path) = &opts.checkpoint {
            let mut st = shared.lock().unwrap();
            st.records.push(rec.clone());
            st.store(path)?;
        }
        records.push(rec);
    }
    Ok(records)
}

/// `Σ_{n≤x} Δ(n)` as a single record.
pub fn partial_sum_delta(x: u64, opts: &SurveyOptions) -> Result<SurveyRecord> {
    if x == 0 {
        return Err(Error::InvalidArgument("x must be at least 1".into()));
    }
    Ok(survey(&[x], opts)?.pop().expect("one record per x"))
}

/// `10, 100, …` up to `x`, then `x` itself.
pub fn decade_grid(x: u64) -> Vec<u64> {
    let mut xs: Vec<u64> = std::iter::successors(Some(10u64), |&v| v.checked_mul(10)).take_while(|&v| v < x).collect();
    xs.push(x);
    xs
}

/// Counts of `n ≤ x` with `2^k ≤ Δ(n) < 2^{k+1}`, indexed by `k`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DeltaHistogram {
    pub x: u64,
    pub bins: Vec<u64>,
}

impl DeltaHistogram {
    fn add(&mut self, delta: u64) {
        let k = 63 - delta.leading_zeros() as usize;
        if self.bins.len() <= k {
            self.bins.resize(k + 1, 0);
        }
        self.bins[k] += 1;
    }

    fn merge(mut self, other: Self) -> Self {
        if self.bins.len() < other.bins.len() {
            self.bins.resize(other.bins.len(), 0);
        }
        for (a, b) in self.bins.iter_mut().zip(other.bins) {
            *a += b;
        }
        self
    }
}

pub fn delta_histogram(x: u64, block_size: u64, workers: usize) -> Result<DeltaHistogram> {
    if x == 0 || block_size == 0 || workers == 0 {
        return Err(Error::InvalidArgument("x, block_size and workers must be positive".into()));
    }
    let plan = plan_blocks(&[x], block_size);
    let parts: Vec<Result<DeltaHistogram>> = pool(workers)?.install(|| {
        plan.par_iter()
            .map(|&(lo, hi)| {
                let block = SieveBlock::new(lo, hi)?;
                Ok(block.fold(DeltaHistogram::default(), |mut h, _, divs| {
                    h.add(delta_of_sorted(divs));
                    h
                }))
            })
            .collect()
    });
    let mut total = DeltaHistogram::default();
    for p in parts {
        total = total.merge(p?);
    }
    total.x = x;
    Ok(total)
}

/// `Σ Δ(n)/n` over `n ∈ S_{<x}` with `n ≤ enum_cap`.
/// Bound field: `(Log₂ x)^{11/4} Log x`.
pub fn log_weighted_sum<T: Real>(x: T, enum_cap: u64) -> Result<TruncatedSum<T>> {
    if !(x >= T::one()) || enum_cap == 0 {
        return Err(Error::InvalidArgument(format!("need x ≥ 1 and enum_cap ≥ 1, got x = {x}, cap = {enum_cap}")));
    }
    let below_x = x.ceil().to_u64().unwrap_or(u64::MAX).saturating_sub(1);
    let limit = below_x.min(enum_cap).max(2);
    let sieve = SpfSieve::new(limit)?;
    let primes: Vec<u64> = sieve.primes().iter().map(|&p| p as u64).filter(|&p| T::of(p) < x).collect();
    let mut acc = CompensatedSum::<T>::new();
    let mut terms = 0u64;
    walk_squarefree(&primes, enum_cap, |ps, n| {
        let f = Factorization::squarefree(ps).expect("ascending distinct primes");
        acc.add(T::of(delta(&f.divisors())) / T::of(n));
        terms += 1;
        true
    });
    let bound = log2_floor(x).powf(T::of(2.75)) * log_floor(x);
    Ok(TruncatedSum { value: acc.value(), bound, terms, enum_cap })
}
