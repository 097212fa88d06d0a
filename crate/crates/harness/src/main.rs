use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use log::info;
use ncdoa::enhancement::sinc_interpolate;
use ncdoa::signal_model::{simulate_snapshot, TargetScene};
use ncdoa::spectral::estimate_doas;
use ncdoa_harness::config::{parse_methods, ConfigFile, ExperimentConfig, Method, Overrides, Section};
use ncdoa_harness::report::{self, PlotMetric};
use ncdoa_harness::{default_sweep_values, run_sweep};

/// Non-coherent DOA estimation from magnitude-only array data.
#[derive(Parser)]
#[command(name = "ncdoa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one snapshot and dump element outputs and |y_n|^2 as CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Explicit scene as `angle:amplitude,...`, reference first.
        #[arg(long)]
        scene: Option<String>,
    },
    /// Read a magnitude-squared sequence from CSV and print the DOAs.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// CSV with a `magnitude_sq` column, or one value per line.
        input: PathBuf,
        /// Upsample by the virtual-array factor before estimating.
        #[arg(long)]
        virtual_array: bool,
    },
    /// MSE against the number of array elements.
    SweepElements(Common),
    /// MSE against per-sensor SNR in dB.
    SweepSnr(Common),
    /// MSE against the maximum phase error in degrees.
    SweepPhaseError(Common),
    /// Mean estimation runtime against the number of array elements.
    Bench(Common),
}

#[derive(Args)]
struct Common {
    /// TOML file with a [common] table and one table per command.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional SVG plot.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Comma-separated methods, e.g. `noncoherent,coherent_omp`.
    #[arg(long)]
    methods: Option<String>,
    /// Sweep values, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Option<Vec<f64>>,
    /// Monte Carlo runs per point.
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long)]
    elements: Option<usize>,
    /// Element spacing in wavelengths.
    #[arg(long)]
    spacing: Option<f64>,
    #[arg(long)]
    noise_variance: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    /// none, per_target_uniform or per_element_common.
    #[arg(long)]
    phase_error_kind: Option<String>,
    #[arg(long)]
    phase_error_deg: Option<f64>,
    /// Number of non-reference targets.
    #[arg(long)]
    unknowns: Option<usize>,
    #[arg(long)]
    angle_bins: Option<usize>,
    /// Run trials on one thread.
    #[arg(long)]
    serial: bool,
}

impl Common {
    fn overrides(&self) -> anyhow::Result<Overrides> {
        Ok(Overrides {
            methods: self.methods.as_deref().map(parse_methods).transpose()?,
            values: self.values.clone(),
            num_runs: self.runs,
            num_snapshots: self.snapshots,
            num_elements: self.elements,
            spacing_ratio: self.spacing,
            noise_variance: self.noise_variance,
            snr_db: self.snr_db,
            phase_error_kind: self.phase_error_kind.as_deref().map(str::parse).transpose()?,
            phase_error_deg: self.phase_error_deg,
            num_unknown: self.unknowns,
            num_angle_bins: self.angle_bins,
            seed: self.seed,
            parallel: self.serial.then_some(false),
            ..Overrides::default()
        })
    }

    /// Defaults, then the config file section, then command-line flags.
    fn resolve(&self, section: Section) -> anyhow::Result<(ExperimentConfig, Overrides)> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?.section(section),
            None => Overrides::default(),
        };
        let cli = self.overrides()?;
        // a noise level from the command line replaces either key from the file
        let file = if cli.noise_variance.is_some() || cli.snr_db.is_some() {
            Overrides {
                noise_variance: None,
                snr_db: None,
                ..file
            }
        } else {
            file
        };
        let merged = file.merged(&cli);
        let mut cfg = ExperimentConfig::default();
        merged.apply(&mut cfg)?;
        Ok((cfg, merged))
    }
}

fn parse_scene(text: &str) -> anyhow::Result<TargetScene> {
    let pairs = text
        .split(',')
        .map(|item| {
            let (a, m) = item
                .split_once(':')
                .with_context(|| format!("scene entry `{item}` is not angle:amplitude"))?;
            Ok((a.trim().parse::<f64>()?, m.trim().parse::<f64>()?))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(TargetScene::from_pairs(&pairs)?)
}

fn simulate(common: &Common, scene: Option<&str>) -> anyhow::Result<()> {
    let (cfg, _) = common.resolve(Section::Simulate)?;
    let scene = match scene {
        Some(text) => parse_scene(text)?,
        None => cfg.scene.sample(cfg.seed)?,
    };
    for t in scene.targets() {
        info!("target {:.4} deg, amplitude {}", t.angle_deg, t.amplitude);
    }
    let snap = simulate_snapshot(&cfg.geometry()?, &scene, &cfg.noise()?, &cfg.phase_error()?, cfg.seed)?;
    match &common.out {
        Some(path) => report::write_snapshot_csv(&snap, path)?,
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "element,re,im,magnitude_sq")?;
            for (n, y) in snap.samples.iter().enumerate() {
                writeln!(out, "{n},{},{},{}", y.re, y.im, y.norm_sqr())?;
            }
        }
    }
    Ok(())
}

fn estimate(common: &Common, input: &Path, virtual_array: bool) -> anyhow::Result<()> {
    let (cfg, _) = common.resolve(Section::Estimate)?;
    let mut a = report::read_magnitudes(input)?;
    let mut spacing = cfg.spacing_ratio;
    if virtual_array {
        a = sinc_interpolate(&a, &cfg.virtual_array)?;
        spacing /= cfg.virtual_array.upsample_factor as f64;
    }
    let est = estimate_doas(&a, &cfg.estimator, spacing)?;
    let mut text = String::from("angle_deg,peak_frequency\n");
    for (a, f) in est.angles_deg.iter().zip(&est.peak_frequencies) {
        text.push_str(&format!("{a},{f}\n"));
    }
    match &common.out {
        Some(path) => std::fs::write(path, text).with_context(|| path.display().to_string())?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn sweep(common: &Common, section: Section) -> anyhow::Result<()> {
    let (cfg, merged) = common.resolve(section)?;
    let methods = merged.methods.unwrap_or_else(|| Method::ALL.to_vec());
    if methods.is_empty() {
        bail!("no methods selected");
    }
    let values = merged.values.unwrap_or_else(|| default_sweep_values(section).to_vec());
    info!(
        "{} methods x {} values, M = {}, seed = {}",
        methods.len(),
        values.len(),
        cfg.num_runs,
        cfg.seed
    );
    let results = run_sweep(section, &cfg, &methods, &values)?;
    match &common.out {
        Some(path) => report::write_csv(&results, path)?,
        None => report::write_results(&results, io::stdout().lock())?,
    }
    if let Some(path) = &common.plot {
        let metric = if section == Section::Bench {
            PlotMetric::Runtime
        } else {
            PlotMetric::Mse
        };
        report::render_plot(&results, path, metric)?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Simulate { common, scene } => simulate(common, scene.as_deref()),
        Command::Estimate {
            common,
            input,
            virtual_array,
        } => estimate(common, input, *virtual_array),
        Command::SweepElements(c) => sweep(c, Section::SweepElements),
        Command::SweepSnr(c) => sweep(c, Section::SweepSnr),
        Command::SweepPhaseError(c) => sweep(c, Section::SweepPhaseError),
        Command::Bench(c) => sweep(c, Section::Bench),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
