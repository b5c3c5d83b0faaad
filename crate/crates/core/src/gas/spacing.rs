//! Monte Carlo estimate of the probability of `n` eigenvalues in `|z|^2 < x / N` for the
//! Gaussian disc.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{batch_means, mcmc_run_with, McmcConfig};
use crate::{PotentialSpec, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSpacingMc {
    pub radius: f64,
    pub chains: usize,
    pub samples: usize,
    pub counts: Vec<u64>,
    pub probabilities: Vec<f64>,
    /// Larger of the multinomial and the batch-means standard error.
    pub stderr: Vec<f64>,
}

/// Runs `chains` independent chains with seeds `seed, seed + 1, ...` and pools them in
/// chain order.
pub fn level_spacing_mc(t0: f64, n: usize, x: f64, config: &McmcConfig, chains: usize) -> Result<LevelSpacingMc> {
    let potential = PotentialSpec::gaussian_disc(t0, n)?;
    if !(x > 0.0) || chains == 0 {
        return Err(crate::Error::InvalidInput(format!("need x > 0 and chains > 0, got {x}, {chains}")));
    }
    let r2 = x / n as f64;
    let runs: Vec<Result<Vec<usize>>> = (0..chains as u64)
        .into_par_iter()
        .map(|c| {
            let cfg = McmcConfig {
                seed: config.seed.wrapping_add(c),
                ..config.clone()
            };
            let mut inside = Vec::with_capacity(cfg.sweeps);
            mcmc_run_with(&potential, &cfg, |zs| inside.push(zs.iter().filter(|z| z.norm_sqr() < r2).count()))?;
            Ok(inside)
        })
        .collect();
    let mut series = Vec::new();
    for r in runs {
        series.extend(r?);
    }
    let samples = series.len();
    let mut counts = vec![0u64; n + 1];
    for &k in &series {
        counts[k] += 1;
    }
    let probabilities: Vec<f64> = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    let stderr = (0..=n)
        .map(|k| {
            let ind: Vec<f64> = series.iter().map(|&s| (s == k) as u8 as f64).collect();
            let (_, bm) = batch_means(&ind, config.batches * chains);
            let p = probabilities[k];
            bm.max((p * (1.0 - p) / samples as f64).sqrt())
        })
        .collect();
    Ok(LevelSpacingMc {
        radius: r2.sqrt(),
        chains,
        samples,
        counts,
        probabilities,
        stderr,
    })
}
