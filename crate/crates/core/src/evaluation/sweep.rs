use rayon::prelude::*;

use super::scenario::{ScenarioConfig, Variant};
use super::trial::Simulator;
use crate::error::Result;
use crate::rng::trial_seed;

/// Mean sum rate at one transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub power_dbm: f64,
    pub mean_sum_rate: f64,
    /// Half-width of the 95% confidence interval of the mean.
    pub ci95: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub variant: Variant,
    pub points: Vec<SweepPoint>,
    /// Per-trial sum rates, `[power][trial]`, in trial order.
    pub samples: Vec<Vec<f64>>,
    pub degraded_trials: usize,
    /// Mean codebook evaluations per trial.
    pub mean_search_evaluations: f64,
}

/// Sample mean and `1.96 s / sqrt(n)`.
pub fn mean_ci95(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * (var / n as f64).sqrt())
}

/// Mean and 95% half-width of the per-trial difference `a - b`. Variants of
/// one sweep share channels and estimates trial by trial, so this paired
/// comparison is the sharp test of which design is better.
pub fn paired_difference(a: &[f64], b: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    mean_ci95(&d)
}

/// Runs `cfg.trials` seeded trials of every variant at every power.
///
/// Trial `i` uses seed `trial_seed(cfg.seed, i)` regardless of thread
/// scheduling, and results are reduced in trial order, so the output is a
/// pure function of the configuration.
pub fn run_sweep(cfg: &ScenarioConfig, variants: &[Variant]) -> Result<Vec<SweepResult>> {
    let sim = Simulator::new(cfg)?;
    let powers = cfg.transmit_power_dbm.len();
    // Per trial: degraded flag and, per variant, the rates over power and
    // the search evaluations.
    type PerTrial = (bool, Vec<(Vec<f64>, usize)>);
    let per_trial: Vec<PerTrial> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|i| {
            let prepared = sim.prepare(trial_seed(cfg.seed, i), variants)?;
            let mut by_variant = Vec::with_capacity(variants.len());
            for &v in variants {
                let mut rates = Vec::with_capacity(powers);
                let mut evals = 0;
                for p in 0..powers {
                    let r = prepared.evaluate(&sim, v, p)?;
                    evals = r.search_evaluations;
                    rates.push(r.sum_rate);
                }
                by_variant.push((rates, evals));
            }
            Ok((prepared.degraded(), by_variant))
        })
        .collect::<Result<_>>()?;

    let degraded = per_trial.iter().filter(|t| t.0).count();
    let mut out = Vec::with_capacity(variants.len());
    for (vi, &variant) in variants.iter().enumerate() {
        let samples: Vec<Vec<f64>> = (0..powers)
            .map(|p| per_trial.iter().map(|t| t.1[vi].0[p]).collect())
            .collect();
        let points = samples
            .iter()
            .zip(&cfg.transmit_power_dbm)
            .map(|(s, &power_dbm)| {
                let (mean_sum_rate, ci95) = mean_ci95(s);
                SweepPoint {
                    power_dbm,
                    mean_sum_rate,
                    ci95,
                }
            })
            .collect();
        let evals = per_trial.iter().map(|t| t.1[vi].1 as f64).sum::<f64>() / per_trial.len() as f64;
        out.push(SweepResult {
            variant,
            points,
            samples,
            degraded_trials: degraded,
            mean_search_evaluations: evals,
        });
    }
    Ok(out)
}
