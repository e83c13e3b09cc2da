//! Scaling benchmark: wall clock and exact multiplication counts of
//! recoveries on random instances.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::io::generate_instance;
use crate::recovery::{recover, RecoveryConfig};
use crate::scalar::counter;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Entry bound of the generating matrices.
    pub bound: u32,
    pub parallel: bool,
    pub recovery: RecoveryConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            dims: vec![5, 10, 20, 40],
            trials: 3,
            seed: 0,
            bound: 3,
            parallel: true,
            recovery: RecoveryConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub dim: usize,
    pub trial: usize,
    pub seed: u64,
    pub seconds: f64,
    pub mul_count: u64,
    pub retries: u32,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub dim: usize,
    pub trials: usize,
    pub mean_seconds: f64,
    pub mean_mul_count: f64,
    pub total_retries: u32,
    /// True only if every trial recovered and verified exactly.
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub seed: u64,
    pub records: Vec<BenchRecord>,
    /// Least-squares slope of `log(mul_count)` against `log(d)`.
    pub mul_count_slope: Option<f64>,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("trial failed at d={dim}, seed={seed}: {error}")]
pub struct BenchFailure {
    pub dim: usize,
    pub seed: u64,
    pub error: Error,
}

/// Seed of trial `trial` at dimension `dim`. Depends only on its inputs, so
/// results do not depend on scheduling.
pub fn trial_seed(seed: u64, dim: usize, trial: usize) -> u64 {
    // splitmix64 finalizer over the combined inputs
    let mut z = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((dim as u64) << 32)
        .wrapping_add(trial as u64);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates and recovers one instance. Multiplications are counted for the
/// recovery only.
pub fn run_trial(
    dim: usize,
    trial: usize,
    seed: u64,
    bound: u32,
    base: &RecoveryConfig,
) -> Result<TrialRecord, BenchFailure> {
    let fail = |error| BenchFailure { dim, seed, error };
    let inst = generate_instance(dim, seed, bound).map_err(fail)?;
    let g = inst.tensor().map_err(fail)?;
    let cfg = RecoveryConfig {
        rng_seed: seed,
        ..base.clone()
    };
    let start = Instant::now();
    let (result, mul_count) = counter::measure(|| recover(&g, &cfg));
    let seconds = start.elapsed().as_secs_f64();
    let rec = result.map_err(fail)?;
    if Some(&rec.matrix) != inst.ground_truth.as_ref() {
        return Err(fail(Error::NotInOrbit {
            stage: crate::error::Stage::Verification,
            iteration: dim,
            reason: "recovered matrix differs from the generating matrix".into(),
        }));
    }
    Ok(TrialRecord {
        dim,
        trial,
        seed,
        seconds,
        mul_count,
        retries: rec.trace.total_retries(),
        success: true,
    })
}

pub fn run_bench(cfg: &BenchConfig) -> Result<(BenchReport, Vec<TrialRecord>), BenchFailure> {
    let jobs: Vec<(usize, usize)> = cfg
        .dims
        .iter()
        .flat_map(|&d| (0..cfg.trials).map(move |t| (d, t)))
        .collect();
    let run = |&(d, t): &(usize, usize)| {
        run_trial(d, t, trial_seed(cfg.seed, d, t), cfg.bound, &cfg.recovery)
    };
    let trials: Vec<TrialRecord> = if cfg.parallel {
        jobs.par_iter().map(run).collect::<Result<_, _>>()?
    } else {
        jobs.iter().map(run).collect::<Result<_, _>>()?
    };

    let records: Vec<BenchRecord> = cfg
        .dims
        .iter()
        .map(|&d| {
            let mine: Vec<&TrialRecord> = trials.iter().filter(|r| r.dim == d).collect();
            let n = mine.len().max(1) as f64;
            BenchRecord {
                dim: d,
                trials: mine.len(),
                mean_seconds: mine.iter().map(|r| r.seconds).sum::<f64>() / n,
                mean_mul_count: mine.iter().map(|r| r.mul_count as f64).sum::<f64>() / n,
                total_retries: mine.iter().map(|r| r.retries).sum(),
                success: mine.iter().all(|r| r.success),
            }
        })
        .collect();
    let points: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.dim as f64, r.mean_mul_count))
        .collect();
    let report = BenchReport {
        seed: cfg.seed,
        mul_count_slope: loglog_slope(&points),
        records,
    };
    Ok((report, trials))
}

/// Least-squares slope of `log y` against `log x`; `None` with fewer than
/// two distinct abscissae.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

impl BenchReport {
    pub fn table(&self) -> String {
        let mut out = String::from("     d  trials   mean_s        mean_muls  retries  ok\n");
        for r in &self.records {
            out.push_str(&format!(
                "{:>6}  {:>6}  {:>7.3}  {:>15.0}  {:>7}  {}\n",
                r.dim,
                r.trials,
                r.mean_seconds,
                r.mean_mul_count,
                r.total_retries,
                if r.success { "yes" } else { "no" }
            ));
        }
        if let Some(slope) = self.mul_count_slope {
            out.push_str(&format!("log-log slope of multiplication count: {slope:.3}\n"));
        }
        out
    }
}
