//! The divisor-window Delta function
//! `Δ(n) = sup_u #{d | n : e^u < d ≤ e^{u+1}}` and the machinery around it:
//! exact window profiles and their moments, the cross-correlation recursion
//! over prime multiplication, level sets controlling `τ(n_{<y})` and the
//! normalized moments, and exact checkpointed partial-sum surveys.
//!
//! Real-valued code is generic over [`Real`] (`f32`/`f64`); the aliases at the
//! crate root fix it to `f64`. Every integer-valued quantity (`τ`, `Δ`, window
//! counts, partial sums) is computed without floating point, with comparisons
//! against `e` certified by a rational enclosure (see [`econst`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod checkpoint;
pub mod delta;
pub mod econst;
pub mod error;
pub mod fit;
pub mod levelset;
pub mod moments;
pub mod num;
pub mod sieve_block;
pub mod step;
pub mod survey;

pub use arith::{euler_product, prime_recip_sum, DivisorList, Factorization, SpfSieve};
pub use delta::{best_window, delta, delta_oracle, delta_profile, WindowCount, DEFAULT_ORACLE_TAU};
pub use error::{Error, Result};
pub use fit::{exponent_fit, FitModel, FitResult};
pub use levelset::{
    classify, f_a, gauss_tail, m_qa, norton_q, recurse_check, t_q_sum, LevelClassification, LevelSetParams,
    MomentBudget, RecurseReport, TruncatedSum,
};
pub use moments::{
    cross_correlation, moment, moment_tuple_oracle, verify_pointwise_bounds, verify_recursion, MomentTable,
    PointwiseReport, DEFAULT_TUPLE_GUARD, MAX_Q,
};
pub use num::Real;
pub use sieve_block::SieveBlock;
pub use step::StepFunction;
pub use survey::{log_weighted_sum, partial_sum_delta, survey, SurveyOptions, SurveyRecord};

/// The profile `u ↦ Δ(n;u)` in double precision.
pub type Profile = StepFunction<f64>;
pub type Params = LevelSetParams<f64>;
pub type Moments = MomentTable<f64>;
pub type Classification = LevelClassification<f64>;
pub type Budget = MomentBudget<f64>;
pub type Recursion = RecurseReport<f64>;
pub type Truncated = TruncatedSum<f64>;
pub type Pointwise = PointwiseReport<f64>;
