//! Metropolis sampling of the eigenvalue gas `P_N ~ |Delta(z)|^2 exp(-N sum V(z_i))` and the
//! statistics compared against the equilibrium measure.

pub mod field;
pub mod measure;
pub mod region;
pub mod spacing;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::curvegeom::{curve_from_moments, PolynomialCurve};
use crate::{Error, PotentialSpec, Result, C64};

pub use field::{effective_field, EffectiveField, FieldOptions};
pub use measure::{default_boundary_layer, density_compare, DensityReport, EmpiricalMeasure};
pub use region::{Region, RowClassifier, REGION_NODES};
pub use spacing::{level_spacing_mc, LevelSpacingMc};

/// Name of the generator recorded in run metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

/// Sweeps between full recomputations of the pairwise log table.
pub const REFRESH_SWEEPS: usize = 10_000;

/// `I = (1/N) sum V(z_i) + (1/N^2) sum_{i != j} log |z_i - z_j|^{-1}`, or `+inf` when two
/// points coincide.
pub fn energy(positions: &[C64], potential: &PotentialSpec) -> f64 {
    let n = positions.len() as f64;
    let mut pot = 0.0;
    let mut inter = 0.0;
    for (i, &z) in positions.iter().enumerate() {
        pot += potential.v(z);
        for &y in &positions[i + 1..] {
            let d = (z - y).norm();
            if d == 0.0 {
                return f64::INFINITY;
            }
            inter -= 2.0 * d.ln();
        }
    }
    pot / n + inter / (n * n)
}

/// `-N sum V(z_i) + 2 sum_{i<j} log |z_i - z_j|`, which equals `-N^2 I`.
pub fn log_weight(positions: &[C64], potential: &PotentialSpec) -> f64 {
    let n = potential.n as f64;
    let mut w = 0.0;
    for (i, &z) in positions.iter().enumerate() {
        w -= n * potential.v(z);
        for &y in &positions[i + 1..] {
            w += 2.0 * (z - y).norm().ln();
        }
    }
    w
}

/// Sampler state with an incrementally maintained log weight.
#[derive(Debug, Clone)]
pub struct GasState {
    pub positions: Vec<C64>,
    pub log_weight: f64,
    pub sweeps: u64,
    pub proposals: u64,
    pub accepted: u64,
    pub seed: u64,
    pub cutoff: f64,
    pub scale: f64,
    /// Largest relative gap between the incremental and recomputed log weight.
    pub max_drift: f64,
    potential: PotentialSpec,
    logs: Vec<f64>,
    rng: ChaCha8Rng,
}

impl GasState {
    /// Uniform start in the disc of radius `cutoff / 2`.
    pub fn dispersed(potential: &PotentialSpec, cutoff: f64, scale: f64, seed: u64) -> Result<Self> {
        if potential.n < 2 {
            return Err(Error::InvalidInput("the gas needs N >= 2".into()));
        }
        if !(cutoff > 0.0 && scale > 0.0) {
            return Err(Error::InvalidInput(format!(
                "cut-off and proposal scale must be positive, got {cutoff}, {scale}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positions: Vec<C64> = (0..potential.n)
            .map(|_| {
                let r = 0.5 * cutoff * rng.gen::<f64>().sqrt();
                C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        Self::from_positions(potential, positions, cutoff, scale, seed, rng)
    }

    fn from_positions(
        potential: &PotentialSpec,
        positions: Vec<C64>,
        cutoff: f64,
        scale: f64,
        seed: u64,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        if positions.iter().any(|z| z.norm() > cutoff) {
            return Err(Error::InvalidInput("start outside the cut-off".into()));
        }
        let mut s = Self {
            log_weight: 0.0,
            positions,
            sweeps: 0,
            proposals: 0,
            accepted: 0,
            seed,
            cutoff,
            scale,
            max_drift: 0.0,
            potential: potential.clone(),
            logs: Vec::new(),
            rng,
        };
        s.refresh();
        s.log_weight = s.recomputed_weight();
        Ok(s)
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    fn n(&self) -> usize {
        self.positions.len()
    }

    fn refresh(&mut self) {
        let n = self.n();
        self.logs = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let l = (self.positions[i] - self.positions[j]).norm().ln();
                self.logs[i * n + j] = l;
                self.logs[j * n + i] = l;
            }
        }
    }

    fn recomputed_weight(&self) -> f64 {
        log_weight(&self.positions, &self.potential)
    }

    /// Change in log weight if particle `i` moved to `z`, with the new log distances.
    pub fn delta(&self, i: usize, z: C64, new_logs: &mut [f64]) -> f64 {
        let n = self.n();
        let nn = self.potential.n as f64;
        let mut d = -nn * (self.potential.v(z) - self.potential.v(self.positions[i]));
        for j in 0..n {
            if j == i {
                new_logs[j] = 0.0;
                continue;
            }
            let l = (z - self.positions[j]).norm().ln();
            new_logs[j] = l;
            d += 2.0 * (l - self.logs[i * n + j]);
        }
        d
    }

    fn accept(&mut self, i: usize, z: C64, new_logs: &[f64], d: f64) {
        let n = self.n();
        self.positions[i] = z;
        for j in 0..n {
            if j != i {
                self.logs[i * n + j] = new_logs[j];
                self.logs[j * n + i] = new_logs[j];
            }
        }
        self.log_weight += d;
    }

    /// One single-site Metropolis pass over all particles; returns the number accepted.
    pub fn sweep(&mut self) -> usize {
        let n = self.n();
        let mut new_logs = vec![0.0; n];
        let mut acc = 0;
        for i in 0..n {
            let g1: f64 = self.rng.sample(StandardNormal);
            let g2: f64 = self.rng.sample(StandardNormal);
            let z = self.positions[i] + C64::new(g1, g2) * self.scale;
            let u: f64 = self.rng.gen();
            self.proposals += 1;
            if z.norm() > self.cutoff {
                continue;
            }
            let d = self.delta(i, z, &mut new_logs);
            if d >= 0.0 || u < d.exp() {
                self.accept(i, z, &new_logs, d);
                self.accepted += 1;
                acc += 1;
            }
        }
        self.sweeps += 1;
        if self.sweeps % REFRESH_SWEEPS as u64 == 0 {
            self.resync();
        }
        acc
    }

    /// Recomputes the log table and weight from scratch, recording the drift.
    pub fn resync(&mut self) {
        self.refresh();
        let fresh = self.recomputed_weight();
        let drift = (fresh - self.log_weight).abs() / fresh.abs().max(1.0);
        self.max_drift = self.max_drift.max(drift);
        self.log_weight = fresh;
    }

    pub fn energy(&self) -> f64 {
        energy(&self.positions, &self.potential)
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub sweeps: usize,
    /// Defaults to `sweeps / 10`.
    pub burn_in: Option<usize>,
    pub seed: u64,
    /// Initial proposal scale; defaults to `0.5 sqrt(t0 / N)`.
    pub proposal_scale: Option<f64>,
    /// Defaults to `max(6 sqrt(t0), 3 * droplet outer radius)`.
    pub cutoff: Option<f64>,
    /// Histogram bins per axis over `[-R_c, R_c]`.
    pub bins: usize,
    /// Batches for the batch-means standard errors.
    pub batches: usize,
}

impl McmcConfig {
    pub fn new(sweeps: usize, seed: u64) -> Self {
        Self {
            sweeps,
            burn_in: None,
            seed,
            proposal_scale: None,
            cutoff: None,
            bins: 200,
            batches: 50,
        }
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in.unwrap_or(self.sweeps / 10)
    }
}

/// Boundary of the equilibrium droplet, when the moment inversion converges.
pub fn droplet(potential: &PotentialSpec) -> Option<PolynomialCurve> {
    if potential.t.iter().all(|t| *t == C64::new(0.0, 0.0)) {
        return Some(PolynomialCurve::circle(potential.t0.sqrt()));
    }
    curve_from_moments(&potential.moments(), 1e-12, 100).ok()
}

/// `max(6 sqrt(t0), 3 * outer radius of the droplet)`.
pub fn default_cutoff(potential: &PotentialSpec) -> f64 {
    let outer = droplet(potential).map(|c| c.outer_radius()).unwrap_or(0.0);
    (6.0 * potential.t0.sqrt()).max(3.0 * outer)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub k: usize,
    /// `(t0/N) mean sum_i z_i^k`.
    pub value: C64,
    /// Batch-means standard errors of the real and imaginary parts.
    pub stderr: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub rng: String,
    pub seed: u64,
    pub sweeps: usize,
    pub burn_in: usize,
    pub samples: usize,
    pub acceptance_rate: f64,
    pub proposal_scale: f64,
    pub cutoff: f64,
    pub moments: Vec<MomentEstimate>,
    /// Fraction of sampled points inside the droplet, with its batch-means standard error.
    pub interior_mass: Option<(f64, f64)>,
    /// `(sweep, I)` over the first decile of sweeps.
    pub energy_trace: Vec<(usize, f64)>,
    /// Least-squares slope of the energy trace.
    pub energy_slope: f64,
    pub max_weight_drift: f64,
}

#[derive(Debug, Clone)]
pub struct McmcRun {
    pub state: GasState,
    pub measure: EmpiricalMeasure,
    pub observables: Observables,
}

fn slope(points: &[(usize, f64)]) -> f64 {
    let n = points.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mx = points.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 as f64 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 as f64 - mx).powi(2)).sum();
    sxy / sxx
}

/// Mean and batch-means standard error.
pub fn batch_means(series: &[f64], batches: usize) -> (f64, f64) {
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n.max(1) as f64;
    let b = batches.min(n).max(2);
    let size = n / b;
    if size == 0 {
        return (mean, f64::INFINITY);
    }
    let means: Vec<f64> = (0..b)
        .map(|k| series[k * size..(k + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let bm = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|m| (m - bm).powi(2)).sum::<f64>() / (b - 1) as f64;
    (mean, (var / b as f64).sqrt())
}

/// Runs the chain, calling `on_sample` with the positions after every post-burn-in sweep.
pub fn mcmc_run_with<F: FnMut(&[C64])>(potential: &PotentialSpec, config: &McmcConfig, mut on_sample: F) -> Result<(GasState, Vec<(usize, f64)>)> {
    let burn_in = config.burn_in();
    if config.sweeps <= burn_in {
        return Err(Error::InvalidInput(format!(
            "sweeps ({}) must exceed burn-in ({burn_in})",
            config.sweeps
        )));
    }
    let cutoff = config.cutoff.unwrap_or_else(|| default_cutoff(potential));
    let scale = config
        .proposal_scale
        .unwrap_or_else(|| 0.5 * (potential.t0 / potential.n as f64).sqrt());
    let mut state = GasState::dispersed(potential, cutoff, scale, config.seed)?;
    let decile = (config.sweeps / 10).max(1);
    let every = (decile / 1000).max(1);
    let mut trace = Vec::new();
    let mut window_acc = 0usize;
    for sweep in 0..config.sweeps {
        if sweep < decile && sweep % every == 0 {
            trace.push((sweep, state.energy()));
        }
        window_acc += state.sweep();
        if sweep < burn_in && (sweep + 1) % 100 == 0 {
            let rate = window_acc as f64 / (100 * potential.n) as f64;
            if rate < 0.3 {
                state.scale *= 0.8;
            } else if rate > 0.5 {
                state.scale *= 1.2;
            }
            window_acc = 0;
        }
        if sweep + 1 == burn_in {
            state.proposals = 0;
            state.accepted = 0;
        }
        if sweep >= burn_in {
            on_sample(&state.positions);
        }
    }
    state.resync();
    Ok((state, trace))
}

/// Metropolis run with histogram and interior-moment estimates `k = 1..=d+3`.
pub fn mcmc_run(potential: &PotentialSpec, config: &McmcConfig) -> Result<McmcRun> {
    let cutoff = config.cutoff.unwrap_or_else(|| default_cutoff(potential));
    let config = McmcConfig {
        cutoff: Some(cutoff),
        ..config.clone()
    };
    let mut measure = EmpiricalMeasure::new(cutoff, config.bins)?;
    let k_max = potential.degree() + 3;
    let mut series: Vec<Vec<C64>> = vec![Vec::new(); k_max];
    let classifier = droplet(potential).map(|c| RowClassifier::new(Region::from_curve(&c, REGION_NODES), 2048));
    let mut inside = Vec::new();
    let (state, trace) = mcmc_run_with(potential, &config, |zs| {
        if let Some(cl) = &classifier {
            inside.push(zs.iter().filter(|z| cl.contains(**z)).count() as f64 / zs.len() as f64);
        }
        let mut sums = vec![C64::new(0.0, 0.0); k_max];
        for &z in zs {
            measure.add(z);
            let mut zk = C64::new(1.0, 0.0);
            for s in sums.iter_mut() {
                zk *= z;
                *s += zk;
            }
        }
        for (k, s) in sums.into_iter().enumerate() {
            series[k].push(s);
        }
    })?;
    let f = potential.t0 / potential.n as f64;
    let moments = series
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let re: Vec<f64> = s.iter().map(|x| x.re * f).collect();
            let im: Vec<f64> = s.iter().map(|x| x.im * f).collect();
            let (mr, er) = batch_means(&re, config.batches);
            let (mi, ei) = batch_means(&im, config.batches);
            MomentEstimate {
                k: k + 1,
                value: C64::new(mr, mi),
                stderr: (er, ei),
            }
        })
        .collect();
    let observables = Observables {
        rng: RNG_ALGORITHM.to_string(),
        seed: config.seed,
        sweeps: config.sweeps,
        burn_in: config.burn_in(),
        samples: config.sweeps - config.burn_in(),
        acceptance_rate: state.acceptance_rate(),
        proposal_scale: state.scale,
        cutoff,
        moments,
        interior_mass: classifier.map(|_| batch_means(&inside, config.batches)),
        energy_slope: slope(&trace),
        energy_trace: trace,
        max_weight_drift: state.max_drift,
    };
    Ok(McmcRun {
        state,
        measure,
        observables,
    })
}
