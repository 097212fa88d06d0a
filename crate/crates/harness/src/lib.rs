//! Monte Carlo harness, file formats and CLI plumbing for the `ncdoa`
//! estimators.

pub mod config;
pub mod error;
pub mod experiment;
pub mod report;

pub use config::{ExperimentConfig, Method};
pub use error::{HarnessError, Result};
pub use experiment::{ExperimentResult, SweepParam};

use config::Section;

/// Sweep values used when neither the command line nor the config file
/// gives any.
pub fn default_sweep_values(section: Section) -> &'static [f64] {
    match section {
        Section::SweepElements | Section::Bench => &[50.0, 100.0, 200.0, 400.0],
        Section::SweepSnr => &[0.0, 5.0, 10.0, 20.0],
        Section::SweepPhaseError => &[0.0, 25.0, 45.0, 90.0],
        Section::Simulate | Section::Estimate => &[],
    }
}

/// Dispatches a sweep section to its runner.
pub fn run_sweep(
    section: Section,
    cfg: &ExperimentConfig,
    methods: &[Method],
    values: &[f64],
) -> Result<Vec<ExperimentResult>> {
    match section {
        Section::SweepElements => experiment::sweep_elements(cfg, methods, values),
        Section::SweepSnr => experiment::sweep_snr(cfg, methods, values),
        Section::SweepPhaseError => experiment::sweep_phase_error(cfg, methods, values),
        Section::Bench => experiment::bench_runtime(cfg, methods, values),
        Section::Simulate | Section::Estimate => {
            Err(HarnessError::Config("simulate and estimate are not sweeps".into()))
        }
    }
}
