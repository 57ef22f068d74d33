//! Least-squares growth exponents of the mean of `Δ` against `Log x` or `Log₂ x`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{log2_floor, log_floor};
use crate::survey::SurveyRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `mean ≈ C (Log x)^k`
    PowLog,
    /// `mean ≈ C (Log₂ x)^k`
    PowLoglog,
}

impl FitModel {
    pub fn name(self) -> &'static str {
        match self {
            FitModel::PowLog => "pow_log",
            FitModel::PowLoglog => "pow_loglog",
        }
    }

    fn abscissa(self, x: f64) -> f64 {
        match self {
            FitModel::PowLog => log_floor(x).ln(),
            FitModel::PowLoglog => log2_floor(x).ln(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub model: FitModel,
    pub exponent: f64,
    pub constant: f64,
    /// Root-mean-square residual in `log(mean)`.
    pub residual: f64,
}

/// Fits `log mean_delta = log C + k · log L(x)` with `L = Log` or `Log₂`.
pub fn exponent_fit(records: &[SurveyRecord], model: FitModel) -> Result<FitResult> {
    let mut xs: Vec<u64> = records.iter().map(|r| r.x).collect();
    xs.sort_unstable();
    xs.dedup();
    if xs.len() < 3 || xs.len() != records.len() {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 records with distinct x, got {} records over {} distinct x",
            records.len(),
            xs.len()
        )));
    }
    let pts: Vec<(f64, f64)> = records.iter().map(|r| (model.abscissa(r.x as f64), r.mean_delta.ln())).collect();
    let n = pts.len() as f64;
    let (mt, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if !(stt > 0.0) {
        return Err(Error::InvalidArgument(format!("{} is constant over the given x", model.name())));
    }
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let slope = sty / stt;
    let intercept = my - slope * mt;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(FitResult { model, exponent: slope, constant: intercept.exp(), residual: (sse / n).sqrt() })
}
