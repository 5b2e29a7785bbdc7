//! Monte Carlo harness comparing the blind predictor with the MMSE
//! baseline: the continuous-power sweep, the atom-count sweep, and the
//! long-horizon theoretical probe.
//!
//! Per-trial seeds are content-addressed (master seed, grid identity,
//! trial index), so results are independent of scheduling and adding
//! grid points never perturbs existing ones.

use num_complex::Complex64;
use rayon::prelude::*;
use std::io::Write;

use crate::mmse::{PredictorMatrices, TheoreticalMmse};
use crate::quantizer::{blind_predict, PipelineOptions};
use crate::sampler::{derive_seed, draw, sigma2_from_snr_db};
use crate::spectrum::{Atom, Segment, SpectralModel};
use crate::{Error, Result};

/// Shared sweep configuration.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Observation (and prediction) window length.
    pub n: usize,
    pub snr_db: f64,
    /// Trials per grid point.
    pub trials: usize,
    pub master_seed: u64,
    pub pipeline: PipelineOptions,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n: 64,
            snr_db: 20.0,
            trials: 200,
            master_seed: 0,
            pipeline: PipelineOptions::default(),
        }
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridPoint {
    /// Fixed two-tone model with this much power in the continuous band.
    ContinuousPower(f64),
    /// `k` equal-power atoms at random separated frequencies plus the
    /// fixed continuous band.
    AtomCount { k: usize, pc: f64 },
}

impl GridPoint {
    /// Content address of the grid point for seed derivation.
    fn seed_parts(&self) -> Vec<u64> {
        match *self {
            GridPoint::ContinuousPower(pc) => vec![1, pc.to_bits()],
            GridPoint::AtomCount { k, pc } => vec![2, k as u64, pc.to_bits()],
        }
    }

    fn sweep_value(&self) -> f64 {
        match *self {
            GridPoint::ContinuousPower(pc) => pc,
            GridPoint::AtomCount { k, .. } => k as f64,
        }
    }
}

/// Two spectral tones at -0.4 and -0.2 sharing the discrete power
/// equally, plus a uniform band on [0.05, 0.15) carrying `pc`.
pub fn pc_sweep_model(pc: f64) -> SpectralModel {
    assert!((0.0..=1.0).contains(&pc));
    let pd = (1.0 - pc) / 2.0;
    let mut atoms = vec![];
    if pd > 0.0 {
        atoms.push(Atom { xi: -0.4, power: pd });
        atoms.push(Atom { xi: -0.2, power: pd });
    }
    let segments = if pc > 0.0 {
        vec![Segment { a: 0.05, b: 0.15, power: pc }]
    } else {
        vec![]
    };
    SpectralModel::new(atoms, segments).expect("sweep model is valid")
}

/// Same two tones with the uniform band moved to [0.2, 0.3); the
/// configuration used for the dual-polynomial demo trace.
pub fn dual_demo_model(pc: f64) -> SpectralModel {
    let pd = (1.0 - pc) / 2.0;
    SpectralModel::new(
        vec![Atom { xi: -0.4, power: pd }, Atom { xi: -0.2, power: pd }],
        vec![Segment { a: 0.2, b: 0.3, power: pc }],
    )
    .expect("demo model is valid")
}

/// `k` atoms at the given frequencies with equal powers `(1-pc)/k`,
/// plus the uniform band on [0.05, 0.15) carrying `pc`.
pub fn k_sweep_model(freqs: &[f64], pc: f64) -> SpectralModel {
    let k = freqs.len();
    assert!(k >= 1);
    let power = (1.0 - pc) / k as f64;
    let atoms = freqs.iter().map(|&xi| Atom { xi, power }).collect();
    let segments = if pc > 0.0 {
        vec![Segment { a: 0.05, b: 0.15, power: pc }]
    } else {
        vec![]
    };
    SpectralModel::new(atoms, segments).expect("k-sweep model is valid")
}

/// Circular distance on the frequency torus.
fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Rejection-sample `k` frequencies uniform on [-1/2, 1/2) with pairwise
/// circular separation larger than `min_sep`.
pub fn sample_separated_frequencies(
    k: usize,
    min_sep: f64,
    rng_seed: u64,
) -> Result<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(rng_seed);
    let max_attempts = 10_000;
    for _ in 0..max_attempts {
        let freqs: Vec<f64> = (0..k).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let ok = (0..k).all(|i| (0..i).all(|j| circ_dist(freqs[i], freqs[j]) > min_sep));
        if ok {
            return Ok(freqs);
        }
    }
    Err(Error::SeparationSampling {
        k,
        min_sep,
        attempts: max_attempts,
    })
}

/// The experiments' error metric: `(1/N) ||g_hat - g||^2`.
pub fn normalized_error(g_hat: &[Complex64], g: &[Complex64]) -> f64 {
    assert_eq!(g_hat.len(), g.len());
    g_hat
        .iter()
        .zip(g)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        / g.len() as f64
}

/// Per-trial outputs; solver trouble is flagged, never dropped.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub e_mmse: f64,
    pub e_blind: f64,
    pub solver_converged: bool,
    pub atoms_recovered: usize,
}

/// Run one trial: build the grid point's model, draw a realization from
/// the content-addressed seed, predict with both the MMSE baseline and
/// the blind pipeline, return both errors. Deterministic.
pub fn run_trial(config: &SweepConfig, point: &GridPoint, trial_index: usize) -> Result<TrialOutcome> {
    let mut parts = point.seed_parts();
    parts.push(trial_index as u64);
    let model = match *point {
        GridPoint::ContinuousPower(pc) => pc_sweep_model(pc),
        GridPoint::AtomCount { k, pc } => {
            let mut freq_parts = parts.clone();
            freq_parts.push(0xF5EE);
            let freqs = sample_separated_frequencies(
                k,
                1.0 / config.n as f64,
                derive_seed(config.master_seed, &freq_parts),
            )?;
            k_sweep_model(&freqs, pc)
        }
    };
    let sample = draw(
        &model,
        config.n,
        config.snr_db,
        derive_seed(config.master_seed, &parts),
    )?;
    let sigma2 = sigma2_from_snr_db(config.snr_db);
    let predictor = PredictorMatrices::new(&model, config.n, sigma2);
    let g_mmse = predictor.predict(&sample.y);
    let blind = blind_predict(&sample.y, sigma2, &config.pipeline)?;
    Ok(TrialOutcome {
        e_mmse: normalized_error(&g_mmse, &sample.g),
        e_blind: normalized_error(&blind.g_hat, &sample.g),
        solver_converged: blind.solution.converged,
        atoms_recovered: blind.spectrum.len(),
    })
}

/// Statistics of one sweep grid point.
#[derive(Debug, Clone)]
pub struct GridPointStats {
    pub sweep_value: f64,
    pub e_mmse_mean: f64,
    pub e_mmse_se: f64,
    pub e_blind_mean: f64,
    pub e_blind_se: f64,
    pub trials: usize,
    pub failures: usize,
    /// Analytic normalized MMSE of the baseline at this grid point; for
    /// the random-frequency sweep, the per-trial models make this an
    /// average over the trial models.
    pub analytic_mmse: f64,
}

/// Monte Carlo results across the grid.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub points: Vec<GridPointStats>,
}

impl SweepResult {
    /// CSV dump: one row per grid point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "sweep_var,e_mmse_mean,e_mmse_se,e_blind_mean,e_blind_se,trials,failures"
        )?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                p.sweep_value,
                p.e_mmse_mean,
                p.e_mmse_se,
                p.e_blind_mean,
                p.e_blind_se,
                p.trials,
                p.failures
            )?;
        }
        Ok(())
    }
}

/// Pairwise (cascade) summation, to keep aggregation independent of
/// trial count drift.
fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = pairwise_sum(values) / n as f64;
    if n < 2 {
        return (mean, f64::INFINITY);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

fn aggregate(point: &GridPoint, outcomes: &[TrialOutcome], analytic: f64) -> GridPointStats {
    let mmse: Vec<f64> = outcomes.iter().map(|o| o.e_mmse).collect();
    let blind: Vec<f64> = outcomes.iter().map(|o| o.e_blind).collect();
    let (m_mean, m_se) = mean_and_se(&mmse);
    let (b_mean, b_se) = mean_and_se(&blind);
    GridPointStats {
        sweep_value: point.sweep_value(),
        e_mmse_mean: m_mean,
        e_mmse_se: m_se,
        e_blind_mean: b_mean,
        e_blind_se: b_se,
        trials: outcomes.len(),
        failures: outcomes.iter().filter(|o| !o.solver_converged).count(),
        analytic_mmse: analytic,
    }
}

fn run_grid_point(config: &SweepConfig, point: GridPoint) -> Result<GridPointStats> {
    let outcomes: Vec<Result<TrialOutcome>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(config, &point, trial))
        .collect();
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let sigma2 = sigma2_from_snr_db(config.snr_db);
    let analytic = match point {
        GridPoint::ContinuousPower(pc) => {
            PredictorMatrices::new(&pc_sweep_model(pc), config.n, sigma2).expected_normalized_error()
        }
        GridPoint::AtomCount { k, pc } => {
            // average the per-trial analytic values over the same trial models
            let vals: Vec<f64> = (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let mut parts = point.seed_parts();
                    parts.push(trial as u64);
                    parts.push(0xF5EE);
                    let freqs = sample_separated_frequencies(
                        k,
                        1.0 / config.n as f64,
                        derive_seed(config.master_seed, &parts),
                    )?;
                    let model = k_sweep_model(&freqs, pc);
                    Ok(PredictorMatrices::new(&model, config.n, sigma2).expected_normalized_error())
                })
                .collect::<Result<Vec<f64>>>()?;
            pairwise_sum(&vals) / vals.len().max(1) as f64
        }
    };
    Ok(aggregate(&point, &outcomes, analytic))
}

/// Sweep the power of the continuous component over `pc_grid`.
pub fn sweep_pc(config: &SweepConfig, pc_grid: &[f64]) -> Result<SweepResult> {
    assert!(!pc_grid.is_empty() && config.trials >= 1);
    assert!(pc_grid.iter().all(|pc| (0.0..=1.0).contains(pc)));
    let points = pc_grid
        .iter()
        .map(|&pc| run_grid_point(config, GridPoint::ContinuousPower(pc)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { points })
}

/// Sweep the number of discrete tones at fixed continuous power.
pub fn sweep_k(config: &SweepConfig, pc: f64, k_grid: &[usize]) -> Result<SweepResult> {
    assert!(!k_grid.is_empty() && config.trials >= 1);
    let points = k_grid
        .iter()
        .map(|&k| run_grid_point(config, GridPoint::AtomCount { k, pc }))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { points })
}

/// One row of the long-horizon probe.
#[derive(Debug, Clone, Copy)]
pub struct TheoremProbeRow {
    pub t: i64,
    pub mmse: f64,
    pub genie: f64,
}

/// Long-horizon MMSE curve with the genie bound alongside.
#[derive(Debug, Clone)]
pub struct TheoremProbe {
    pub rows: Vec<TheoremProbeRow>,
    /// `max_t (genie - mmse)`; non-positive means the data-processing
    /// inequality held at every probed horizon.
    pub max_dpi_violation: f64,
    /// Continuous power of the probed model (the floor the MMSE
    /// approaches at long horizons).
    pub continuous_power: f64,
}

/// Evaluate the theoretical MMSE and the genie bound over a horizon grid.
pub fn theorem1_probe(model: &SpectralModel, sigma2: f64, n: usize, t_grid: &[i64]) -> TheoremProbe {
    let probe = TheoreticalMmse::new(model, sigma2, n);
    let rows: Vec<TheoremProbeRow> = t_grid
        .iter()
        .map(|&t| TheoremProbeRow {
            t,
            mmse: probe.direct(t),
            genie: probe.genie(t),
        })
        .collect();
    let max_dpi_violation = rows
        .iter()
        .map(|r| r.genie - r.mmse)
        .fold(f64::NEG_INFINITY, f64::max);
    TheoremProbe {
        rows,
        max_dpi_violation,
        continuous_power: model.continuous_power(),
    }
}

impl TheoremProbe {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,mmse,genie_mmse")?;
        for r in &self.rows {
            writeln!(out, "{},{},{}", r.t, r.mmse, r.genie)?;
        }
        Ok(())
    }
}
