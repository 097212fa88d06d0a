//! Monte Carlo runner for the MSE and runtime sweeps.
//!
//! Every trial draws a fresh scene and fresh snapshots from a seed derived
//! from the master seed and the trial index only. Methods and sweep values
//! therefore see the same scenes and noise (common random numbers), and the
//! output does not depend on thread scheduling.

use std::fmt;
use std::time::Instant;

use log::{debug, warn};
use ncdoa::assignment::{failure_squared_error, optimal_assignment, run_squared_error, MseAccumulator};
use ncdoa::enhancement::{integrate_snapshots, sinc_interpolate, verify_sampling};
use ncdoa::omp::{baseline_mse_angles, build_dictionary, omp_estimate, SteeringDictionary};
use ncdoa::signal_model::{
    magnitude_squared, simulate_snapshot_set, ArrayGeometry, MagnitudeSequence, NoiseModel, PhaseErrorModel,
    SnapshotSet, TargetScene,
};
use ncdoa::spectral::{check_reference_dominance, estimate_doas};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Method};
use crate::error::Result;

const SCENE_SEED_STREAM: u64 = 0;
const SNAPSHOT_SEED_STREAM: u64 = 1;

/// Independent 64-bit seed number `index` on `stream` of `master`.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(index) * 2);
    rng.next_u64()
}

/// Seed of trial `run` under master seed `master`.
pub fn trial_seed(master: u64, run: usize) -> u64 {
    derive_seed(master, u64::MAX, run as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    NumElements,
    SnrDb,
    PhaseErrorDeg,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::NumElements => "num_elements",
            SweepParam::SnrDb => "snr_db",
            SweepParam::PhaseErrorDeg => "phase_error_deg",
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One row of a sweep: a method evaluated at one sweep value over M runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub method: Method,
    pub sweep_param: SweepParam,
    pub sweep_value: f64,
    /// Mean over runs of the summed squared angle error of the unknowns.
    pub mse_deg2: f64,
    pub mean_runtime_s: f64,
    pub num_failures: usize,
    pub num_runs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    /// Non-reference angles in scene order.
    pub true_angles: Vec<f64>,
    /// Estimates paired with `true_angles`; `None` when estimation failed.
    pub estimated_angles: Option<Vec<f64>>,
    pub squared_error: f64,
    /// Wall-clock time of the estimation step alone.
    pub runtime_s: f64,
    pub dominance_holds: bool,
}

impl TrialOutcome {
    pub fn failed(&self) -> bool {
        self.estimated_angles.is_none()
    }
}

/// Per-point state shared by all trials.
struct PointContext {
    geometry: ArrayGeometry,
    noise: NoiseModel,
    phase: PhaseErrorModel,
    dictionary: Option<SteeringDictionary>,
}

impl PointContext {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let geometry = cfg.geometry()?;
        let dictionary = if cfg.method.is_coherent() {
            Some(build_dictionary(&geometry, cfg.num_angle_bins)?)
        } else {
            None
        };
        if cfg.method.uses_virtual_array() && !verify_sampling(&geometry) {
            warn!(
                "spacing ratio {} undersamples the magnitude sequence; virtual elements will alias",
                geometry.spacing_ratio()
            );
        }
        Ok(Self {
            geometry,
            noise: cfg.noise()?,
            phase: cfg.phase_error()?,
            dictionary,
        })
    }
}

/// Simulates and scores a single Monte Carlo trial.
pub fn run_trial(cfg: &ExperimentConfig, trial_seed: u64) -> Result<TrialOutcome> {
    run_trial_in(cfg, &PointContext::new(cfg)?, trial_seed)
}

/// Like [`run_trial`] but on a given scene instead of a sampled one.
pub fn run_scene_trial(cfg: &ExperimentConfig, scene: &TargetScene, trial_seed: u64) -> Result<TrialOutcome> {
    run_on_scene(cfg, &PointContext::new(cfg)?, scene, trial_seed)
}

fn run_trial_in(cfg: &ExperimentConfig, ctx: &PointContext, seed: u64) -> Result<TrialOutcome> {
    let scene = cfg.scene.sample(derive_seed(seed, SCENE_SEED_STREAM, 0))?;
    run_on_scene(cfg, ctx, &scene, seed)
}

fn run_on_scene(cfg: &ExperimentConfig, ctx: &PointContext, scene: &TargetScene, seed: u64) -> Result<TrialOutcome> {
    let dominance_holds = scene.len() < 2 || check_reference_dominance(scene)?;
    if !dominance_holds {
        debug!("trial {seed:#x}: reference does not dominate the unknown cross terms");
    }
    let snapshots = simulate_snapshot_set(
        &ctx.geometry,
        scene,
        &ctx.noise,
        &ctx.phase,
        cfg.num_snapshots,
        derive_seed(seed, SNAPSHOT_SEED_STREAM, 0),
    )?;
    let truth = scene.unknown_angles();

    let start = Instant::now();
    let estimates = match &ctx.dictionary {
        Some(dict) => estimate_coherent(&snapshots, dict, scene)?,
        None => estimate_noncoherent(cfg, &snapshots)?,
    };
    let runtime_s = start.elapsed().as_secs_f64();

    let squared_error = match &estimates {
        Some(est) => run_squared_error(&truth, est)?,
        None => failure_squared_error(&truth),
    };
    // report estimates in truth order
    let estimates = estimates.map(|est| match optimal_assignment(&truth, &est) {
        Some(order) => order.iter().map(|&j| est[j]).collect(),
        None => est,
    });
    Ok(TrialOutcome {
        true_angles: truth,
        estimated_angles: estimates,
        squared_error,
        runtime_s,
        dominance_holds,
    })
}

fn estimate_noncoherent(cfg: &ExperimentConfig, snapshots: &SnapshotSet) -> Result<Option<Vec<f64>>> {
    let mut magnitudes: MagnitudeSequence = if cfg.method.integrates_snapshots() {
        let seqs: Vec<MagnitudeSequence> = snapshots.snapshots.iter().map(magnitude_squared).collect();
        integrate_snapshots(&seqs)?
    } else {
        magnitude_squared(&snapshots.snapshots[0])
    };
    let mut spacing = cfg.spacing_ratio;
    if cfg.method.uses_virtual_array() {
        magnitudes = sinc_interpolate(&magnitudes, &cfg.virtual_array)?;
        // virtual elements sit 1/factor of an element apart
        spacing /= cfg.virtual_array.upsample_factor as f64;
    }
    match estimate_doas(&magnitudes, &cfg.estimator, spacing) {
        Ok(est) => Ok(Some(est.angles_deg)),
        Err(ncdoa::Error::InsufficientPeaks { requested, found }) => {
            debug!("estimation failed: {found} of {requested} peaks");
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn estimate_coherent(
    snapshots: &SnapshotSet,
    dict: &SteeringDictionary,
    scene: &TargetScene,
) -> Result<Option<Vec<f64>>> {
    let result = omp_estimate(snapshots, dict, scene.len())?;
    if result.ill_conditioned {
        warn!("OMP selected numerically dependent atoms");
    }
    let pairs = baseline_mse_angles(&result, scene);
    if pairs.len() < scene.len() - 1 {
        return Ok(None);
    }
    Ok(Some(pairs.into_iter().map(|(_, e)| e).collect()))
}

/// Runs `cfg.num_runs` trials and aggregates them into one result row.
pub fn run_point(cfg: &ExperimentConfig, sweep_param: SweepParam, sweep_value: f64) -> Result<ExperimentResult> {
    let ctx = PointContext::new(cfg)?;
    let seeds: Vec<u64> = (0..cfg.num_runs).map(|r| trial_seed(cfg.seed, r)).collect();
    let outcomes: Vec<TrialOutcome> = if cfg.parallel {
        seeds
            .par_iter()
            .map(|s| run_trial_in(cfg, &ctx, *s))
            .collect::<Result<_>>()?
    } else {
        seeds.iter().map(|s| run_trial_in(cfg, &ctx, *s)).collect::<Result<_>>()?
    };

    let mut acc = MseAccumulator::new();
    let mut runtime = 0.0;
    let mut weak_reference = 0;
    for o in &outcomes {
        acc.add_squared_error(o.squared_error, o.failed());
        runtime += o.runtime_s;
        weak_reference += usize::from(!o.dominance_holds);
    }
    if weak_reference > 0 {
        warn!(
            "{}: {weak_reference} of {} scenes violate the reference dominance condition",
            cfg.method, cfg.num_runs
        );
    }
    Ok(ExperimentResult {
        method: cfg.method,
        sweep_param,
        sweep_value,
        mse_deg2: acc.mse(),
        mean_runtime_s: runtime / cfg.num_runs as f64,
        num_failures: acc.failures(),
        num_runs: cfg.num_runs,
        seed: cfg.seed,
    })
}

fn sweep(
    cfg: &ExperimentConfig,
    methods: &[Method],
    values: &[f64],
    param: SweepParam,
    set: impl Fn(&mut ExperimentConfig, f64) -> Result<()>,
) -> Result<Vec<ExperimentResult>> {
    let mut rows = Vec::with_capacity(methods.len() * values.len());
    for &method in methods {
        for &value in values {
            let mut point = cfg.clone();
            point.method = method;
            set(&mut point, value)?;
            rows.push(run_point(&point, param, value)?);
        }
    }
    Ok(rows)
}

fn element_count(value: f64) -> Result<usize> {
    if value.fract() != 0.0 || value < 2.0 {
        return Err(crate::error::HarnessError::Config(format!("element count {value} is not an integer >= 2")));
    }
    Ok(value as usize)
}

/// MSE against the number of array elements.
pub fn sweep_elements(cfg: &ExperimentConfig, methods: &[Method], counts: &[f64]) -> Result<Vec<ExperimentResult>> {
    sweep(cfg, methods, counts, SweepParam::NumElements, |c, v| {
        c.num_elements = element_count(v)?;
        Ok(())
    })
}

/// MSE against per-sensor SNR in dB (`variance = 10^(-snr/10)`).
pub fn sweep_snr(cfg: &ExperimentConfig, methods: &[Method], snr_db: &[f64]) -> Result<Vec<ExperimentResult>> {
    sweep(cfg, methods, snr_db, SweepParam::SnrDb, |c, v| {
        c.noise_variance = NoiseModel::from_snr_db(v)?.variance();
        Ok(())
    })
}

/// MSE against the maximum phase error in degrees, using the configured
/// phase-error kind.
pub fn sweep_phase_error(
    cfg: &ExperimentConfig,
    methods: &[Method],
    max_error_deg: &[f64],
) -> Result<Vec<ExperimentResult>> {
    sweep(cfg, methods, max_error_deg, SweepParam::PhaseErrorDeg, |c, v| {
        c.phase_error_deg = v;
        Ok(())
    })
}

/// Mean estimation runtime against element count. Trials run sequentially
/// so timings are not skewed by contention.
pub fn bench_runtime(cfg: &ExperimentConfig, methods: &[Method], counts: &[f64]) -> Result<Vec<ExperimentResult>> {
    let serial = ExperimentConfig {
        parallel: false,
        ..cfg.clone()
    };
    sweep_elements(&serial, methods, counts)
}
