//! Experiment configuration and its TOML file form.
//!
//! The file is flat key-value text. A `[common]` table sets shared values
//! and each sweep has its own table whose keys override `[common]` for that
//! sweep only:
//!
//! ```toml
//! [common]
//! num_runs = 100
//! methods = ["noncoherent_virtual_integrated", "coherent_omp"]
//!
//! [sweep_snr]
//! values = [0, 5, 10, 20]
//! num_elements = 200
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ncdoa::enhancement::VirtualArrayConfig;
use ncdoa::signal_model::{ArrayGeometry, NoiseModel, PhaseErrorKind, PhaseErrorModel, SceneSampler};
use ncdoa::spectral::EstimatorConfig;
use serde::Deserialize;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Noncoherent,
    NoncoherentVirtual,
    NoncoherentIntegrated,
    NoncoherentVirtualIntegrated,
    CoherentOmp,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Noncoherent,
        Method::NoncoherentVirtual,
        Method::NoncoherentIntegrated,
        Method::NoncoherentVirtualIntegrated,
        Method::CoherentOmp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Noncoherent => "noncoherent",
            Method::NoncoherentVirtual => "noncoherent_virtual",
            Method::NoncoherentIntegrated => "noncoherent_integrated",
            Method::NoncoherentVirtualIntegrated => "noncoherent_virtual_integrated",
            Method::CoherentOmp => "coherent_omp",
        }
    }

    pub fn uses_virtual_array(self) -> bool {
        matches!(self, Method::NoncoherentVirtual | Method::NoncoherentVirtualIntegrated)
    }

    pub fn integrates_snapshots(self) -> bool {
        matches!(self, Method::NoncoherentIntegrated | Method::NoncoherentVirtualIntegrated)
    }

    pub fn is_coherent(self) -> bool {
        self == Method::CoherentOmp
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| HarnessError::UnknownMethod(s.to_string()))
    }
}

/// Parses a comma-separated method list such as `noncoherent,coherent_omp`.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(Method::from_str)
        .collect()
}

/// Everything one Monte Carlo point needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub method: Method,
    pub num_runs: usize,
    pub num_snapshots: usize,
    pub num_elements: usize,
    pub spacing_ratio: f64,
    pub scene: SceneSampler,
    pub noise_variance: f64,
    pub phase_error_kind: PhaseErrorKind,
    pub phase_error_deg: f64,
    pub estimator: EstimatorConfig,
    pub virtual_array: VirtualArrayConfig,
    pub num_angle_bins: usize,
    pub seed: u64,
    /// Run trials on the rayon pool. Results do not depend on this.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let scene = SceneSampler::default();
        Self {
            method: Method::NoncoherentVirtualIntegrated,
            num_runs: 100,
            num_snapshots: 5,
            num_elements: 200,
            spacing_ratio: 0.5,
            scene,
            noise_variance: 0.04,
            phase_error_kind: PhaseErrorKind::PerTargetUniform,
            phase_error_deg: 0.0,
            estimator: EstimatorConfig::with_unknowns(scene.num_unknown),
            virtual_array: VirtualArrayConfig::default(),
            num_angle_bins: 200,
            seed: 0,
            parallel: true,
        }
    }
}

impl ExperimentConfig {
    pub fn geometry(&self) -> Result<ArrayGeometry> {
        Ok(ArrayGeometry::new(self.num_elements, self.spacing_ratio)?)
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        Ok(NoiseModel::new(self.noise_variance)?)
    }

    pub fn phase_error(&self) -> Result<PhaseErrorModel> {
        Ok(PhaseErrorModel::new(self.phase_error_kind, self.phase_error_deg)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_runs == 0 {
            return Err(HarnessError::Config("num_runs must be at least 1".into()));
        }
        if self.num_snapshots == 0 {
            return Err(HarnessError::Config("num_snapshots must be at least 1".into()));
        }
        if self.estimator.num_unknown_targets != self.scene.num_unknown {
            return Err(HarnessError::Config(format!(
                "estimator looks for {} targets but the scene has {} unknowns",
                self.estimator.num_unknown_targets, self.scene.num_unknown
            )));
        }
        self.geometry()?;
        self.noise()?;
        self.phase_error()?;
        self.estimator.validate()?;
        if self.virtual_array.upsample_factor == 0 {
            return Err(ncdoa::Error::InvalidUpsampleFactor.into());
        }
        if self.method.is_coherent() && self.num_angle_bins < self.scene.num_unknown + 1 {
            return Err(HarnessError::Config(format!(
                "{} angle bins cannot hold {} targets",
                self.num_angle_bins,
                self.scene.num_unknown + 1
            )));
        }
        Ok(())
    }
}

/// Optional overrides; every field maps onto [`ExperimentConfig`].
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub methods: Option<Vec<Method>>,
    pub values: Option<Vec<f64>>,
    pub num_runs: Option<usize>,
    pub num_snapshots: Option<usize>,
    pub num_elements: Option<usize>,
    pub spacing_ratio: Option<f64>,
    pub noise_variance: Option<f64>,
    pub snr_db: Option<f64>,
    pub phase_error_kind: Option<PhaseErrorKindName>,
    pub phase_error_deg: Option<f64>,
    pub num_unknown: Option<usize>,
    pub angle_min_deg: Option<f64>,
    pub angle_max_deg: Option<f64>,
    pub min_separation_deg: Option<f64>,
    pub ref_amplitude: Option<f64>,
    pub unknown_amplitude: Option<f64>,
    pub zero_pad_factor: Option<usize>,
    pub dc_guard_bins: Option<usize>,
    pub refine: Option<bool>,
    pub upsample_factor: Option<usize>,
    pub interpolation_halfwidth: Option<usize>,
    pub num_angle_bins: Option<usize>,
    pub seed: Option<u64>,
    pub parallel: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseErrorKindName {
    None,
    PerTargetUniform,
    PerElementCommon,
}

impl FromStr for PhaseErrorKindName {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(Self::None),
            "per_target_uniform" => Ok(Self::PerTargetUniform),
            "per_element_common" => Ok(Self::PerElementCommon),
            other => Err(HarnessError::Config(format!("unknown phase error kind `{other}`"))),
        }
    }
}

impl From<PhaseErrorKindName> for PhaseErrorKind {
    fn from(k: PhaseErrorKindName) -> Self {
        match k {
            PhaseErrorKindName::None => PhaseErrorKind::None,
            PhaseErrorKindName::PerTargetUniform => PhaseErrorKind::PerTargetUniform,
            PhaseErrorKindName::PerElementCommon => PhaseErrorKind::PerElementCommon,
        }
    }
}

impl Overrides {
    /// Field-wise merge; keys set in `other` win over `self`.
    pub fn merged(&self, other: &Overrides) -> Overrides {
        macro_rules! pick {
            ($($f:ident),*) => { Overrides { $($f: other.$f.clone().or_else(|| self.$f.clone()),)* } };
        }
        pick!(
            methods, values, num_runs, num_snapshots, num_elements, spacing_ratio, noise_variance, snr_db,
            phase_error_kind, phase_error_deg, num_unknown, angle_min_deg, angle_max_deg, min_separation_deg,
            ref_amplitude, unknown_amplitude, zero_pad_factor, dc_guard_bins, refine, upsample_factor,
            interpolation_halfwidth, num_angle_bins, seed, parallel
        )
    }

    /// Writes every set field into `cfg`.
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(v) = self.num_runs {
            cfg.num_runs = v;
        }
        if let Some(v) = self.num_snapshots {
            cfg.num_snapshots = v;
        }
        if let Some(v) = self.num_elements {
            cfg.num_elements = v;
        }
        if let Some(v) = self.spacing_ratio {
            cfg.spacing_ratio = v;
        }
        match (self.noise_variance, self.snr_db) {
            (Some(_), Some(_)) => {
                return Err(HarnessError::Config("set noise_variance or snr_db, not both".into()))
            }
            (Some(v), None) => cfg.noise_variance = v,
            (None, Some(snr)) => cfg.noise_variance = NoiseModel::from_snr_db(snr)?.variance(),
            (None, None) => {}
        }
        if let Some(v) = self.phase_error_kind {
            cfg.phase_error_kind = v.into();
        }
        if let Some(v) = self.phase_error_deg {
            cfg.phase_error_deg = v;
        }
        if let Some(v) = self.num_unknown {
            cfg.scene.num_unknown = v;
            cfg.estimator.num_unknown_targets = v;
        }
        if let Some(v) = self.angle_min_deg {
            cfg.scene.angle_min_deg = v;
        }
        if let Some(v) = self.angle_max_deg {
            cfg.scene.angle_max_deg = v;
        }
        if let Some(v) = self.min_separation_deg {
            cfg.scene.min_separation_deg = v;
        }
        if let Some(v) = self.ref_amplitude {
            cfg.scene.ref_amplitude = v;
        }
        if let Some(v) = self.unknown_amplitude {
            cfg.scene.unknown_amplitude = v;
        }
        if let Some(v) = self.zero_pad_factor {
            cfg.estimator.zero_pad_factor = v;
        }
        if let Some(v) = self.dc_guard_bins {
            cfg.estimator.dc_guard_bins = Some(v);
        }
        if let Some(v) = self.refine {
            cfg.estimator.refine = v;
        }
        if let Some(v) = self.upsample_factor {
            cfg.virtual_array.upsample_factor = v;
        }
        if let Some(v) = self.interpolation_halfwidth {
            cfg.virtual_array.interpolation_halfwidth = Some(v);
        }
        if let Some(v) = self.num_angle_bins {
            cfg.num_angle_bins = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.parallel {
            cfg.parallel = v;
        }
        Ok(())
    }
}

/// Which table of the config file a command reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Simulate,
    Estimate,
    SweepElements,
    SweepSnr,
    SweepPhaseError,
    Bench,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub common: Overrides,
    #[serde(default)]
    pub simulate: Overrides,
    #[serde(default)]
    pub estimate: Overrides,
    #[serde(default)]
    pub sweep_elements: Overrides,
    #[serde(default)]
    pub sweep_snr: Overrides,
    #[serde(default)]
    pub sweep_phase_error: Overrides,
    #[serde(default)]
    pub bench: Overrides,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {}", path.display(), e.message())))
    }

    /// `[common]` merged with the command's own table.
    pub fn section(&self, section: Section) -> Overrides {
        let own = match section {
            Section::Simulate => &self.simulate,
            Section::Estimate => &self.estimate,
            Section::SweepElements => &self.sweep_elements,
            Section::SweepSnr => &self.sweep_snr,
            Section::SweepPhaseError => &self.sweep_phase_error,
            Section::Bench => &self.bench,
        };
        self.common.merged(own)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_roundtrip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("gespar".parse::<Method>().is_err());
        assert_eq!(
            parse_methods("noncoherent, coherent_omp").unwrap(),
            vec![Method::Noncoherent, Method::CoherentOmp]
        );
    }

    #[test]
    fn defaults_follow_experiment_setup() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.spacing_ratio, 0.5);
        assert_eq!(cfg.scene.num_unknown, 2);
        assert_eq!(cfg.scene.ref_amplitude, 100.0);
        assert_eq!(cfg.scene.unknown_amplitude, 1.0);
        assert_eq!((cfg.scene.angle_min_deg, cfg.scene.angle_max_deg), (10.0, 90.0));
        assert_eq!(cfg.num_angle_bins, 200);
        assert_eq!(cfg.num_snapshots, 5);
        assert_eq!(cfg.noise_variance, 0.04);
        assert_eq!(cfg.virtual_array.upsample_factor, 2);
        cfg.validate().unwrap();
    }

    #[test]
    fn sections_override_common() {
        let file: ConfigFile = toml::from_str(
            r#"
            [common]
            num_runs = 10
            num_elements = 64
            methods = ["noncoherent"]

            [sweep_snr]
            num_elements = 128
            values = [0.0, 10.0]
            "#,
        )
        .unwrap();
        let o = file.section(Section::SweepSnr);
        assert_eq!(o.num_runs, Some(10));
        assert_eq!(o.num_elements, Some(128));
        assert_eq!(o.values, Some(vec![0.0, 10.0]));
        let mut cfg = ExperimentConfig::default();
        o.apply(&mut cfg).unwrap();
        assert_eq!((cfg.num_runs, cfg.num_elements), (10, 128));
        assert_eq!(file.section(Section::Bench).num_elements, Some(64));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<ConfigFile>("[common]\nbogus = 1\n").is_err());
    }

    #[test]
    fn snr_and_variance_conflict() {
        let o = Overrides {
            noise_variance: Some(0.1),
            snr_db: Some(10.0),
            ..Default::default()
        };
        assert!(o.apply(&mut ExperimentConfig::default()).is_err());
        let o = Overrides {
            snr_db: Some(10.0),
            ..Default::default()
        };
        let mut cfg = ExperimentConfig::default();
        o.apply(&mut cfg).unwrap();
        assert!((cfg.noise_variance - 0.1).abs() < 1e-15);
    }

    #[test]
    fn validation_catches_mismatch() {
        let mut cfg = ExperimentConfig::default();
        cfg.estimator.num_unknown_targets = 3;
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            num_runs: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
