//! Monte Carlo simulation of the frequency-scan measurement and the
//! estimators run on its outcomes.
//!
//! Every grid point of every trial draws from its own ChaCha8 block range,
//! addressed by `(seed, trial, grid index)`, so results do not depend on
//! how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composite::{sequence_jet_direct, sequence_probabilities, SequenceSpec};
use crate::error::{Error, Result};
use crate::fisher::{crb_variance, fisher_from_jet, golden_section_min};

/// Clamp applied to probabilities inside the log-likelihood.
pub const LIKELIHOOD_EPSILON: f64 = 1e-12;
pub const BOOTSTRAP_RESAMPLES: usize = 1000;
pub const MIN_TRIALS: usize = 100;

/// Word offset between consecutive grid points of one trial's stream
/// (2^40 words, i.e. 2^39 uniform draws per point).
const GRID_STRIDE_WORDS: u32 = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanProtocol {
    /// True resonance frequency used to generate data.
    pub resonance: f64,
    /// Drive frequencies, strictly increasing.
    pub grid: Vec<f64>,
    pub shots: u64,
    /// Pulse train applied at each grid point; its resonance is replaced
    /// by `resonance`.
    pub sequence: SequenceSpec,
    pub seed: u64,
}

impl ScanProtocol {
    pub fn new(
        sequence: SequenceSpec,
        resonance: f64,
        grid: Vec<f64>,
        shots: u64,
        seed: u64,
    ) -> Result<Self> {
        let protocol = ScanProtocol {
            resonance,
            grid,
            shots,
            sequence: sequence.with_resonance(resonance),
            seed,
        };
        protocol.validate()?;
        Ok(protocol)
    }

    /// `points` equally spaced drive frequencies covering
    /// `resonance ± half_span`.
    pub fn centered(
        sequence: SequenceSpec,
        resonance: f64,
        half_span: f64,
        points: usize,
        shots: u64,
        seed: u64,
    ) -> Result<Self> {
        if points < 3 || !(half_span > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "centered grid needs at least 3 points and a positive span, got {points} and {half_span}"
            )));
        }
        let step = 2.0 * half_span / (points - 1) as f64;
        let grid = (0..points)
            .map(|j| resonance - half_span + step * j as f64)
            .collect();
        Self::new(sequence, resonance, grid, shots, seed)
    }

    pub fn validate(&self) -> Result<()> {
        self.sequence.base.validate()?;
        if self.grid.len() < 3 {
            return Err(Error::InvalidConfig(format!(
                "scan needs at least 3 grid points, got {}",
                self.grid.len()
            )));
        }
        if self.grid.iter().any(|w| !w.is_finite()) || self.grid.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(Error::InvalidConfig(
                "scan grid must be finite and strictly increasing".into(),
            ));
        }
        if !(self.resonance > self.grid[0] && self.resonance < self.grid[self.grid.len() - 1]) {
            return Err(Error::InvalidConfig(format!(
                "resonance {} must lie strictly inside the grid span",
                self.resonance
            )));
        }
        if self.shots == 0 {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Ground-state probability at each grid frequency.
    pub fn ground_probabilities(&self) -> Result<Vec<f64>> {
        self.grid
            .iter()
            .map(|&w| {
                Ok(sequence_probabilities(&self.sequence.with_drive(w))?
                    .0
                    .clamp(0.0, 1.0))
            })
            .collect()
    }

    /// Classical Fisher information summed over the grid, per shot.
    pub fn total_fisher_per_shot(&self) -> Result<f64> {
        self.grid.iter().try_fold(0.0, |acc, &w| {
            let (cfi, _) = fisher_from_jet(&sequence_jet_direct(&self.sequence.with_drive(w))?)?;
            Ok(acc + cfi)
        })
    }

    /// `1 / (shots * sum_j F(omega_j))`.
    pub fn crb(&self) -> Result<f64> {
        crb_variance(self.total_fisher_per_shot()?, self.shots)
    }
}

fn trial_stream(seed: u64, trial: u64, grid_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng.set_word_pos((grid_index as u128) << GRID_STRIDE_WORDS);
    rng
}

/// Ground-state counts for one trial given the per-point probabilities.
pub fn simulate_counts(p0: &[f64], shots: u64, seed: u64, trial: u64) -> Vec<u64> {
    p0.iter()
        .enumerate()
        .map(|(j, &p)| {
            let mut rng = trial_stream(seed, trial, j);
            (0..shots).filter(|_| rng.random::<f64>() < p).count() as u64
        })
        .collect()
}

/// Ground-state counts at each grid frequency for trial `trial`.
pub fn simulate_scan(protocol: &ScanProtocol, trial: u64) -> Result<Vec<u64>> {
    protocol.validate()?;
    Ok(simulate_counts(
        &protocol.ground_probabilities()?,
        protocol.shots,
        protocol.seed,
        trial,
    ))
}

/// Grid frequency with the fewest ground-state outcomes. Ties go to the
/// tied point closest to the grid median (the lower one if two are equally
/// close).
pub fn argmin_estimator(grid: &[f64], counts: &[u64]) -> Result<f64> {
    if grid.is_empty() || grid.len() != counts.len() {
        return Err(Error::InvalidConfig(format!(
            "{} counts for {} grid points",
            counts.len(),
            grid.len()
        )));
    }
    let n = grid.len();
    let median = if n % 2 == 1 {
        grid[n / 2]
    } else {
        0.5 * (grid[n / 2 - 1] + grid[n / 2])
    };
    let fewest = *counts.iter().min().expect("nonempty");
    let best = (0..n)
        .filter(|&j| counts[j] == fewest)
        .min_by(|&i, &j| {
            (grid[i] - median)
                .abs()
                .total_cmp(&(grid[j] - median).abs())
        })
        .expect("at least one minimum");
    Ok(grid[best])
}

/// Binomial log-likelihood of `counts` under `model` with resonance
/// `resonance`.
pub fn log_likelihood(
    grid: &[f64],
    counts: &[u64],
    shots: u64,
    model: &SequenceSpec,
    resonance: f64,
) -> Result<f64> {
    let seq = model.with_resonance(resonance);
    let mut total = 0.0;
    for (&w, &k) in grid.iter().zip(counts) {
        let p0 = sequence_probabilities(&seq.with_drive(w))?
            .0
            .clamp(LIKELIHOOD_EPSILON, 1.0 - LIKELIHOOD_EPSILON);
        let k = k as f64;
        total += k * p0.ln() + (shots as f64 - k) * (1.0 - p0).ln();
    }
    Ok(total)
}

/// Maximum-likelihood resonance over the grid span: a dense pre-scan
/// (20 points per grid interval) followed by golden-section refinement.
pub fn mle_estimator(
    grid: &[f64],
    counts: &[u64],
    shots: u64,
    model: &SequenceSpec,
) -> Result<f64> {
    if grid.len() < 2 || grid.len() != counts.len() {
        return Err(Error::InvalidConfig(format!(
            "{} counts for {} grid points",
            counts.len(),
            grid.len()
        )));
    }
    if counts.iter().any(|&k| k > shots) {
        return Err(Error::InvalidConfig("count exceeds shots".into()));
    }
    if counts.iter().all(|&k| k == 0) {
        return Err(Error::DegenerateData(
            "no ground-state outcomes at any frequency",
        ));
    }
    if counts.iter().all(|&k| k == shots) {
        return Err(Error::DegenerateData(
            "only ground-state outcomes at every frequency",
        ));
    }
    let lo = grid[0];
    let hi = grid[grid.len() - 1];
    let scan_points = 20 * (grid.len() - 1) + 1;
    let step = (hi - lo) / (scan_points - 1) as f64;
    let mut best = (lo, f64::NEG_INFINITY);
    for j in 0..scan_points {
        let w0 = lo + step * j as f64;
        let ll = log_likelihood(grid, counts, shots, model, w0)?;
        if ll > best.1 {
            best = (w0, ll);
        }
    }
    let a = (best.0 - step).max(lo);
    let b = (best.0 + step).min(hi);
    let refined = golden_section_min(
        |w0| -log_likelihood(grid, counts, shots, model, w0).unwrap_or(f64::NEG_INFINITY),
        a,
        b,
        1e-12 * (hi - lo),
    );
    if log_likelihood(grid, counts, shots, model, refined)? >= best.1 {
        Ok(refined)
    } else {
        Ok(best.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Argmin,
    Mle,
}

impl Estimator {
    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::Argmin => "argmin",
            Estimator::Mle => "mle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub estimator: Estimator,
    pub trials: usize,
    pub mean: f64,
    pub bias: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub crb: f64,
    /// `variance / crb`.
    pub ratio: f64,
    /// Bootstrap 95% percentile interval on `ratio`.
    pub ratio_ci_low: f64,
    pub ratio_ci_high: f64,
}

impl EstimationReport {
    pub fn ci_half_width(&self) -> f64 {
        0.5 * (self.ratio_ci_high - self.ratio_ci_low)
    }

    /// Variance not below the bound beyond twice the bootstrap half-width.
    pub fn respects_crb(&self) -> bool {
        self.ratio >= 1.0 - 2.0 * self.ci_half_width()
    }
}

fn mean_and_variance(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let ss = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, ss / (n - 1.0))
}

/// Sample statistics of `estimates` against the true value and the bound,
/// with a seeded percentile bootstrap of the variance ratio.
pub fn variance_report(
    estimator: Estimator,
    estimates: &[f64],
    truth: f64,
    crb: f64,
    bootstrap_seed: u64,
) -> Result<EstimationReport> {
    if estimates.len() < MIN_TRIALS {
        return Err(Error::InvalidConfig(format!(
            "variance report needs at least {MIN_TRIALS} trials, got {}",
            estimates.len()
        )));
    }
    if !(crb > 0.0 && crb.is_finite()) {
        return Err(Error::Domain(format!("bound must be positive, got {crb}")));
    }
    let n = estimates.len();
    let (mean, variance) = mean_and_variance(estimates.iter().copied());
    let mut rng = ChaCha8Rng::seed_from_u64(bootstrap_seed);
    let mut ratios: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let picks: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            mean_and_variance(picks.iter().map(|&i| estimates[i])).1 / crb
        })
        .collect();
    ratios.sort_by(f64::total_cmp);
    let lo_index = (0.025 * BOOTSTRAP_RESAMPLES as f64).floor() as usize;
    let hi_index =
        ((0.975 * BOOTSTRAP_RESAMPLES as f64).ceil() as usize - 1).min(BOOTSTRAP_RESAMPLES - 1);
    Ok(EstimationReport {
        estimator,
        trials: n,
        mean,
        bias: mean - truth,
        variance,
        crb,
        ratio: variance / crb,
        ratio_ci_low: ratios[lo_index],
        ratio_ci_high: ratios[hi_index],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub trials: usize,
    pub total_fisher_per_shot: f64,
    pub crb: f64,
    pub argmin: EstimationReport,
    pub mle: EstimationReport,
    /// Trials whose counts gave a flat likelihood; excluded from `mle`.
    pub degenerate_trials: usize,
}

/// Runs `trials` independent scans in parallel and reports both
/// estimators. Output is bit-identical for a given protocol and trial
/// count, whatever the thread count.
pub fn run_experiment(protocol: &ScanProtocol, trials: usize) -> Result<ExperimentReport> {
    protocol.validate()?;
    if trials < MIN_TRIALS {
        return Err(Error::InvalidConfig(format!(
            "at least {MIN_TRIALS} trials required, got {trials}"
        )));
    }
    let p0 = protocol.ground_probabilities()?;
    let total_fisher = protocol.total_fisher_per_shot()?;
    let crb = crb_variance(total_fisher, protocol.shots)?;

    let outcomes: Vec<(f64, Option<f64>)> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<(f64, Option<f64>)> {
            let counts = simulate_counts(&p0, protocol.shots, protocol.seed, trial);
            let argmin = argmin_estimator(&protocol.grid, &counts)?;
            let mle =
                match mle_estimator(&protocol.grid, &counts, protocol.shots, &protocol.sequence) {
                    Ok(w) => Some(w),
                    Err(Error::DegenerateData(_)) => None,
                    Err(e) => return Err(e),
                };
            Ok((argmin, mle))
        })
        .collect::<Result<_>>()?;

    let argmin_estimates: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let mle_estimates: Vec<f64> = outcomes.iter().filter_map(|o| o.1).collect();
    let bootstrap_seed = protocol.seed ^ 0x9e37_79b9_7f4a_7c15;
    Ok(ExperimentReport {
        trials,
        total_fisher_per_shot: total_fisher,
        crb,
        argmin: variance_report(
            Estimator::Argmin,
            &argmin_estimates,
            protocol.resonance,
            crb,
            bootstrap_seed,
        )?,
        mle: variance_report(
            Estimator::Mle,
            &mle_estimates,
            protocol.resonance,
            crb,
            bootstrap_seed,
        )?,
        degenerate_trials: trials - mle_estimates.len(),
    })
}
