//! SNR sweeps and high-SNR slope fits.

use serde::{Deserialize, Serialize};

use super::evaluate::{evaluate_plan, Evaluation};
use super::stream_seed;
use crate::error::{Error, Result};
use crate::scheme::{rate_accounting, DofPair, MessageId, TransmissionPlan};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Number of top-of-grid points the slope is fitted on.
    pub fit_points: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            snr_grid_db: vec![20.0, 30.0, 40.0, 50.0, 60.0],
            trials: 2000,
            seed: 0x5eed_d0f5,
            fit_points: 3,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fit_points < 2 {
            return Err(Error::InvalidConfig(format!(
                "fit_points must be at least 2, got {}",
                self.fit_points
            )));
        }
        if self.snr_grid_db.len() < self.fit_points {
            return Err(Error::GridTooSmall {
                grid: self.snr_grid_db.len(),
                fit_points: self.fit_points,
            });
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be positive".into()));
        }
        if self.snr_grid_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("SNR grid has a non-finite entry".into()));
        }
        if self.snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("SNR grid must be strictly ascending".into()));
        }
        if self.snr_grid_db[0] <= 0.0 {
            return Err(Error::InvalidConfig("SNR grid must stay above 0 dB".into()));
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub evaluation: Evaluation,
    /// `R_k(P) / L` for both users.
    pub user_rates: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    /// Least-squares slopes of `R_k / L` against `log2 P`.
    pub fitted: DofPair,
    /// DoF pair the plan is built for.
    pub target: DofPair,
    /// Per message, the worst `rate - prelog * log2 P` over its decoding
    /// contexts at the top SNR.
    pub margins: Vec<(MessageId, f64)>,
}

impl SweepResult {
    /// Whether both fitted slopes are within `tol` of the target.
    pub fn within(&self, tol: f64) -> bool {
        (self.fitted.d1 - self.target.d1).abs() <= tol && (self.fitted.d2 - self.target.d2).abs() <= tol
    }
}

/// Ordinary least-squares slope of `ys` on `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn sweep(plan: &TransmissionPlan, cfg: &SimConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let l = plan.subbands();
    let points: Vec<SweepPoint> = cfg
        .snr_grid_db
        .iter()
        .enumerate()
        .map(|(k, &snr_db)| {
            let evaluation = evaluate_plan(plan, db_to_linear(snr_db), cfg.trials, stream_seed(cfg.seed, k as u64));
            let user_rates = evaluation.user_rates(plan.common_owner, l);
            SweepPoint {
                snr_db,
                evaluation,
                user_rates,
            }
        })
        .collect();

    let top = &points[points.len() - cfg.fit_points..];
    let xs: Vec<f64> = top.iter().map(|pt| db_to_linear(pt.snr_db).log2()).collect();
    let slope = |u: usize| fit_slope(&xs, &top.iter().map(|pt| pt.user_rates[u]).collect::<Vec<_>>());
    let fitted = DofPair {
        d1: slope(0),
        d2: slope(1),
    };

    let last = &points[points.len() - 1].evaluation;
    let log2p = last.snr.log2();
    let margins = last
        .messages
        .iter()
        .map(|m| {
            let worst = m
                .contexts
                .iter()
                .map(|&k| last.steps[k].mean_rate_bits - m.target_prelog * log2p)
                .fold(f64::INFINITY, f64::min);
            (m.message, worst)
        })
        .collect();

    Ok(SweepResult {
        points,
        fitted,
        target: rate_accounting(plan),
        margins,
    })
}
