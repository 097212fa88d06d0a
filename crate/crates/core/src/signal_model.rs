//! Far-field narrowband snapshot model for a uniform linear array.
//!
//! Element `n` of an `N`-element array with spacing `d` sees
//!
//! ```text
//! y_n = sum_i |x_i| exp(j (2 pi n (d / lambda) cos(theta_i) + gamma_{n,i})) + v_n
//! ```
//!
//! where `gamma` is a phase error and `v_n` is circular complex Gaussian
//! noise. Only the magnitudes `a_n = |y_n|^2` are available to the
//! non-coherent estimator; [`expand_harmonics`] gives their closed form as a
//! DC term plus one cosine per target pair.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::spectral::pair_frequency;

const NOISE_STREAM: u64 = 0;
const PHASE_STREAM: u64 = 1;
const SCENE_STREAM: u64 = 2;

/// Attempts allowed per target before scene sampling gives up.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

/// Element count and spacing of a uniform linear array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    num_elements: usize,
    spacing_ratio: f64,
}

impl ArrayGeometry {
    /// `spacing_ratio` is the element spacing in wavelengths (`d / lambda`).
    pub fn new(num_elements: usize, spacing_ratio: f64) -> Result<Self> {
        if num_elements < 2 {
            return Err(Error::TooFewElements(num_elements));
        }
        if !(spacing_ratio > 0.0 && spacing_ratio.is_finite()) {
            return Err(Error::InvalidSpacing(spacing_ratio));
        }
        Ok(Self {
            num_elements,
            spacing_ratio,
        })
    }

    /// Half-wavelength spacing.
    pub fn half_wavelength(num_elements: usize) -> Result<Self> {
        Self::new(num_elements, 0.5)
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn spacing_ratio(&self) -> f64 {
        self.spacing_ratio
    }
}

/// A far-field source with a constant received amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub angle_deg: f64,
    pub amplitude: f64,
}

impl Target {
    pub fn new(angle_deg: f64, amplitude: f64) -> Result<Self> {
        if !(0.0..=180.0).contains(&angle_deg) {
            return Err(Error::InvalidAngle(angle_deg));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidAmplitude(amplitude));
        }
        Ok(Self {
            angle_deg,
            amplitude,
        })
    }

    /// Spatial frequency in cycles per element.
    pub fn spatial_frequency(&self, spacing_ratio: f64) -> f64 {
        spacing_ratio * self.angle_deg.to_radians().cos()
    }
}

/// Targets present in one scene, one of which is the strong reference.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetScene {
    targets: Vec<Target>,
    reference_index: usize,
}

impl TargetScene {
    /// The reference must carry the largest amplitude in the scene.
    pub fn new(targets: Vec<Target>, reference_index: usize) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::EmptyScene);
        }
        let reference = targets.get(reference_index).ok_or(Error::InvalidReference {
            index: reference_index,
            len: targets.len(),
        })?;
        if targets.iter().any(|t| t.amplitude > reference.amplitude) {
            return Err(Error::ReferenceNotStrongest);
        }
        Ok(Self {
            targets,
            reference_index,
        })
    }

    /// Builds a scene from `(angle_deg, amplitude)` pairs with the reference first.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let targets = pairs
            .iter()
            .map(|&(angle, amp)| Target::new(angle, amp))
            .collect::<Result<Vec<_>>>()?;
        Self::new(targets, 0)
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn reference_index(&self) -> usize {
        self.reference_index
    }

    pub fn reference(&self) -> &Target {
        &self.targets[self.reference_index]
    }

    /// Every target except the reference, in scene order.
    pub fn unknowns(&self) -> impl Iterator<Item = &Target> + '_ {
        self.targets
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != self.reference_index)
            .map(|(_, t)| t)
    }

    /// Angles of the non-reference targets, in scene order.
    pub fn unknown_angles(&self) -> Vec<f64> {
        self.unknowns().map(|t| t.angle_deg).collect()
    }

    /// Same scene with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let targets = self
            .targets
            .iter()
            .map(|t| Target::new(t.angle_deg, t.amplitude * factor))
            .collect::<Result<Vec<_>>>()?;
        Self::new(targets, self.reference_index)
    }
}

/// How phase errors enter the element outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseErrorKind {
    None,
    /// Independent `gamma_{n,i}` per element and target, uniform in `[0, max]`.
    #[default]
    PerTargetUniform,
    /// One `gamma_n` per element, uniform in `[0, max]`, rotating the whole
    /// element output (signal and receiver noise alike).
    PerElementCommon,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseErrorModel {
    kind: PhaseErrorKind,
    max_error_deg: f64,
}

impl PhaseErrorModel {
    pub fn new(kind: PhaseErrorKind, max_error_deg: f64) -> Result<Self> {
        if !(max_error_deg >= 0.0 && max_error_deg.is_finite()) {
            return Err(Error::InvalidPhaseError(max_error_deg));
        }
        Ok(Self {
            kind,
            max_error_deg,
        })
    }

    pub fn none() -> Self {
        Self {
            kind: PhaseErrorKind::None,
            max_error_deg: 0.0,
        }
    }

    pub fn kind(&self) -> PhaseErrorKind {
        self.kind
    }

    pub fn max_error_deg(&self) -> f64 {
        self.max_error_deg
    }

    fn is_active(&self) -> bool {
        self.kind != PhaseErrorKind::None && self.max_error_deg > 0.0
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        rng.random::<f64>() * self.max_error_deg.to_radians()
    }
}

/// Zero-mean circular complex Gaussian noise with total variance `variance`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseModel {
    variance: f64,
}

impl NoiseModel {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance >= 0.0 && variance.is_finite()) {
            return Err(Error::InvalidNoiseVariance(variance));
        }
        Ok(Self { variance })
    }

    pub fn noiseless() -> Self {
        Self { variance: 0.0 }
    }

    /// Noise variance giving a per-sensor SNR of `snr_db`.
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        Self::new(10.0.powf(-snr_db / 10.0))
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }
}

/// Complex array output for one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub samples: Vec<Complex64>,
}

impl Snapshot {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Snapshots of a fixed scene at successive time instants.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSet {
    pub snapshots: Vec<Snapshot>,
}

impl SnapshotSet {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn num_elements(&self) -> usize {
        self.snapshots.first().map_or(0, Snapshot::len)
    }
}

/// Squared magnitudes `a_n = |y_n|^2` indexed by element.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeSequence {
    values: Vec<f64>,
}

impl MagnitudeSequence {
    /// Negative or non-finite entries are rejected as `InvalidAmplitude`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidAmplitude(bad));
        }
        Ok(Self { values })
    }

    pub(crate) fn from_nonnegative(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| *v >= 0.0));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Every entry multiplied by `factor` (must be non-negative).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * factor).collect())
    }
}

/// One term of the harmonic expansion of `a_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicComponent {
    /// Cycles per element.
    pub normalized_frequency: f64,
    pub amplitude: f64,
    /// Scene indices of the contributing pair; `(i, i)` marks the DC term.
    pub target_pair: (usize, usize),
}

impl HarmonicComponent {
    pub fn is_dc(&self) -> bool {
        self.target_pair.0 == self.target_pair.1
    }
}

fn standard_complex_normal(rng: &mut ChaCha8Rng, std_per_axis: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * std_per_axis, im * std_per_axis)
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn simulate_with(
    geometry: &ArrayGeometry,
    scene: &TargetScene,
    noise: &NoiseModel,
    phase_err: &PhaseErrorModel,
    noise_rng: &mut ChaCha8Rng,
    phase_rng: &mut ChaCha8Rng,
) -> Snapshot {
    let spacing = geometry.spacing_ratio();
    let freqs: Vec<f64> = scene
        .targets()
        .iter()
        .map(|t| t.spatial_frequency(spacing))
        .collect();
    let std_per_axis = (noise.variance() / 2.0).sqrt();
    let phase_active = phase_err.is_active();

    let samples = (0..geometry.num_elements())
        .map(|n| {
            let mut y = Complex64::new(0.0, 0.0);
            for (target, freq) in scene.targets().iter().zip(&freqs) {
                // reduce the cycle count before scaling by 2 pi to keep phases exact for large n
                let cycles = (n as f64 * freq).fract();
                let mut phase = 2.0 * PI * cycles;
                if phase_active && phase_err.kind() == PhaseErrorKind::PerTargetUniform {
                    phase += phase_err.draw(phase_rng);
                }
                y += Complex64::from_polar(target.amplitude, phase);
            }
            if noise.variance() > 0.0 {
                y += standard_complex_normal(noise_rng, std_per_axis);
            }
            if phase_active && phase_err.kind() == PhaseErrorKind::PerElementCommon {
                y *= Complex64::from_polar(1.0, phase_err.draw(phase_rng));
            }
            y
        })
        .collect();
    Snapshot { samples }
}

/// Simulates one array snapshot. Deterministic for a given `rng_seed`.
///
/// Noise and phase errors come from separate generator streams, so switching
/// the phase-error model never changes the noise realization.
pub fn simulate_snapshot(
    geometry: &ArrayGeometry,
    scene: &TargetScene,
    noise: &NoiseModel,
    phase_err: &PhaseErrorModel,
    rng_seed: u64,
) -> Result<Snapshot> {
    let mut set = simulate_snapshot_set(geometry, scene, noise, phase_err, 1, rng_seed)?;
    Ok(set.snapshots.remove(0))
}

/// Simulates `num_snapshots` snapshots with independent noise and phase
/// errors; the first one equals [`simulate_snapshot`] for the same seed.
pub fn simulate_snapshot_set(
    geometry: &ArrayGeometry,
    scene: &TargetScene,
    noise: &NoiseModel,
    phase_err: &PhaseErrorModel,
    num_snapshots: usize,
    rng_seed: u64,
) -> Result<SnapshotSet> {
    if scene.is_empty() {
        return Err(Error::EmptyScene);
    }
    if num_snapshots == 0 {
        return Err(Error::NoSnapshots);
    }
    let mut noise_rng = seeded(rng_seed, NOISE_STREAM);
    let mut phase_rng = seeded(rng_seed, PHASE_STREAM);
    let snapshots = (0..num_snapshots)
        .map(|_| simulate_with(geometry, scene, noise, phase_err, &mut noise_rng, &mut phase_rng))
        .collect();
    Ok(SnapshotSet { snapshots })
}

/// `a_n = |y_n|^2`.
pub fn magnitude_squared(snapshot: &Snapshot) -> MagnitudeSequence {
    MagnitudeSequence::from_nonnegative(snapshot.samples.iter().map(|y| y.norm_sqr()).collect())
}

/// Closed-form expansion of the noiseless, phase-error-free `a_n`: one DC
/// term carrying `sum_i |x_i|^2` followed by one cosine per unordered pair.
pub fn expand_harmonics(geometry: &ArrayGeometry, scene: &TargetScene) -> Vec<HarmonicComponent> {
    let targets = scene.targets();
    let k = targets.len();
    let mut out = Vec::with_capacity(1 + k * k.saturating_sub(1) / 2);
    out.push(HarmonicComponent {
        normalized_frequency: 0.0,
        amplitude: targets.iter().map(|t| t.amplitude * t.amplitude).sum(),
        target_pair: (scene.reference_index(), scene.reference_index()),
    });
    for i in 0..k {
        for j in (i + 1)..k {
            out.push(HarmonicComponent {
                normalized_frequency: pair_frequency(
                    targets[i].angle_deg,
                    targets[j].angle_deg,
                    geometry.spacing_ratio(),
                ),
                amplitude: 2.0 * targets[i].amplitude * targets[j].amplitude,
                target_pair: (i, j),
            });
        }
    }
    out
}

/// Synthesizes `DC + sum amp * cos(2 pi f n)` at element index `n`.
pub fn evaluate_harmonics(components: &[HarmonicComponent], n: i64) -> f64 {
    components
        .iter()
        .map(|c| {
            if c.is_dc() {
                c.amplitude
            } else {
                let cycles = (n as f64 * c.normalized_frequency).fract();
                c.amplitude * (2.0 * PI * cycles).cos()
            }
        })
        .sum()
}

/// Per-sensor SNR in dB for a noise variance: `-10 log10(variance)`.
pub fn snr_from_noise_var(variance: f64) -> Result<f64> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::InvalidNoiseVariance(variance));
    }
    Ok(-10.0 * variance.log10())
}

/// Random scene generator: a reference at 0 deg plus uniformly placed unknowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneSampler {
    pub num_unknown: usize,
    pub angle_min_deg: f64,
    pub angle_max_deg: f64,
    pub min_separation_deg: f64,
    pub ref_amplitude: f64,
    pub unknown_amplitude: f64,
}

impl Default for SceneSampler {
    fn default() -> Self {
        Self {
            num_unknown: 2,
            angle_min_deg: 10.0,
            angle_max_deg: 90.0,
            min_separation_deg: 5.0,
            ref_amplitude: 100.0,
            unknown_amplitude: 1.0,
        }
    }
}

impl SceneSampler {
    /// Draws a scene by rejection sampling. The reference sits at index 0.
    pub fn sample(&self, rng_seed: u64) -> Result<TargetScene> {
        let (lo, hi) = (self.angle_min_deg, self.angle_max_deg);
        if !(0.0..=180.0).contains(&lo) || !(0.0..=180.0).contains(&hi) || lo > hi {
            return Err(Error::InvalidAngleBounds { min: lo, max: hi });
        }
        if self.min_separation_deg.is_nan() || self.min_separation_deg < 0.0 {
            return Err(Error::InvalidAngleBounds { min: lo, max: hi });
        }
        let mut rng = seeded(rng_seed, SCENE_STREAM);
        let mut targets = Vec::with_capacity(self.num_unknown + 1);
        targets.push(Target::new(0.0, self.ref_amplitude)?);

        let budget = MAX_PLACEMENT_ATTEMPTS * self.num_unknown.max(1);
        let mut attempts = 0;
        while targets.len() <= self.num_unknown {
            if attempts == budget {
                return Err(Error::SeparationInfeasible {
                    count: self.num_unknown,
                    separation: self.min_separation_deg,
                    attempts,
                });
            }
            attempts += 1;
            let angle = if hi > lo { rng.random_range(lo..=hi) } else { lo };
            let clear = targets[1..]
                .iter()
                .all(|t| (t.angle_deg - angle).abs() >= self.min_separation_deg);
            if clear {
                targets.push(Target::new(angle, self.unknown_amplitude)?);
            }
        }
        TargetScene::new(targets, 0)
    }
}

/// Scene sampling with explicit arguments.
pub fn sample_scene(
    rng_seed: u64,
    num_unknown: usize,
    angle_min_deg: f64,
    angle_max_deg: f64,
    min_separation_deg: f64,
    ref_amplitude: f64,
    unknown_amplitude: f64,
) -> Result<TargetScene> {
    SceneSampler {
        num_unknown,
        angle_min_deg,
        angle_max_deg,
        min_separation_deg,
        ref_amplitude,
        unknown_amplitude,
    }
    .sample(rng_seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn noiseless(geom: &ArrayGeometry, scene: &TargetScene) -> Snapshot {
        simulate_snapshot(geom, scene, &NoiseModel::noiseless(), &PhaseErrorModel::none(), 0).unwrap()
    }

    #[test]
    fn broadside_target_is_constant() {
        let geom = ArrayGeometry::half_wavelength(4).unwrap();
        let scene = TargetScene::from_pairs(&[(90.0, 1.0)]).unwrap();
        let snap = noiseless(&geom, &scene);
        for y in &snap.samples {
            assert!(close(*y, Complex64::new(1.0, 0.0), 1e-15));
        }
    }

    #[test]
    fn endfire_target_alternates() {
        let geom = ArrayGeometry::half_wavelength(4).unwrap();
        let scene = TargetScene::from_pairs(&[(0.0, 1.0)]).unwrap();
        let snap = noiseless(&geom, &scene);
        let expected = [1.0, -1.0, 1.0, -1.0];
        for (y, e) in snap.samples.iter().zip(expected) {
            assert!(close(*y, Complex64::new(e, 0.0), 1e-14), "{y} vs {e}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(ArrayGeometry::new(1, 0.5), Err(Error::TooFewElements(1)));
        assert!(ArrayGeometry::new(4, 0.0).is_err());
        assert_eq!(TargetScene::new(vec![], 0), Err(Error::EmptyScene));
        assert!(Target::new(181.0, 1.0).is_err());
        assert!(Target::new(10.0, 0.0).is_err());
        assert_eq!(NoiseModel::new(-1.0), Err(Error::InvalidNoiseVariance(-1.0)));
        assert!(PhaseErrorModel::new(PhaseErrorKind::PerTargetUniform, -1.0).is_err());
        assert_eq!(
            TargetScene::from_pairs(&[(0.0, 1.0), (30.0, 2.0)]),
            Err(Error::ReferenceNotStrongest)
        );
    }

    #[test]
    fn snapshot_set_rejects_zero() {
        let geom = ArrayGeometry::half_wavelength(4).unwrap();
        let scene = TargetScene::from_pairs(&[(0.0, 1.0)]).unwrap();
        let err = simulate_snapshot_set(
            &geom,
            &scene,
            &NoiseModel::noiseless(),
            &PhaseErrorModel::none(),
            0,
            1,
        );
        assert_eq!(err, Err(Error::NoSnapshots));
    }

    #[test]
    fn snapshot_set_first_matches_single() {
        let geom = ArrayGeometry::half_wavelength(16).unwrap();
        let scene = TargetScene::from_pairs(&[(0.0, 100.0), (60.0, 1.0), (25.0, 1.0)]).unwrap();
        let noise = NoiseModel::new(0.04).unwrap();
        let phase = PhaseErrorModel::new(PhaseErrorKind::PerTargetUniform, 30.0).unwrap();
        let single = simulate_snapshot(&geom, &scene, &noise, &phase, 42).unwrap();
        let set = simulate_snapshot_set(&geom, &scene, &noise, &phase, 1, 42).unwrap();
        assert_eq!(set.snapshots, vec![single.clone()]);
        let five = simulate_snapshot_set(&geom, &scene, &noise, &phase, 5, 42).unwrap();
        assert_eq!(five.snapshots[0], single);
        assert_ne!(five.snapshots[1], single);
    }

    #[test]
    fn noiseless_snapshots_repeat() {
        let geom = ArrayGeometry::half_wavelength(8).unwrap();
        let scene = TargetScene::from_pairs(&[(0.0, 100.0), (60.0, 1.0)]).unwrap();
        let set = simulate_snapshot_set(
            &geom,
            &scene,
            &NoiseModel::noiseless(),
            &PhaseErrorModel::none(),
            5,
            9,
        )
        .unwrap();
        assert!(set.snapshots.iter().all(|s| *s == set.snapshots[0]));
    }

    #[test]
    fn magnitude_of_unit_samples() {
        let snap = Snapshot {
            samples: vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
            ],
        };
        assert_eq!(magnitude_squared(&snap).values(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn two_target_expansion() {
        let geom = ArrayGeometry::half_wavelength(8).unwrap();
        let scene = TargetScene::from_pairs(&[(0.0, 100.0), (60.0, 1.0)]).unwrap();
        let comps = expand_harmonics(&geom, &scene);
        assert_eq!(comps.len(), 2);
        assert!(comps[0].is_dc());
        assert_eq!(comps[0].amplitude, 10001.0);
        assert!((comps[1].normalized_frequency - 0.25).abs() < 1e-15);
        assert_eq!(comps[1].amplitude, 200.0);
    }

    #[test]
    fn three_target_expansion() {
        let geom = ArrayGeometry::half_wavelength(8).unwrap();
        let scene =
            TargetScene::from_pairs(&[(0.0, 100.0), (60.0, 1.0), (25.0, 1.0)]).unwrap();
        let comps = expand_harmonics(&geom, &scene);
        assert_eq!(comps.len(), 4);
        let pair = comps.iter().find(|c| c.target_pair == (1, 2)).unwrap();
        assert_eq!(pair.amplitude, 2.0);
    }

    #[test]
    fn single_target_is_dc_only() {
        let geom = ArrayGeometry::half_wavelength(8).unwrap();
        let scene = TargetScene::from_pairs(&[(40.0, 3.0)]).unwrap();
        let comps = expand_harmonics(&geom, &scene);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].amplitude, 9.0);
    }

    #[test]
    fn evaluate_simple_components() {
        let dc = [HarmonicComponent {
            normalized_frequency: 0.0,
            amplitude: 3.0,
            target_pair: (0, 0),
        }];
        assert!((0..10).all(|n| evaluate_harmonics(&dc, n) == 3.0));
        let comps = [
            HarmonicComponent {
                normalized_frequency: 0.0,
                amplitude: 2.0,
                target_pair: (0, 0),
            },
            HarmonicComponent {
                normalized_frequency: 0.25,
                amplitude: 2.0,
                target_pair: (0, 1),
            },
        ];
        assert_eq!(evaluate_harmonics(&comps, 0), 4.0);
    }

    #[test]
    fn magnitude_matches_expansion_three_targets() {
        let geom = ArrayGeometry::half_wavelength(200).unwrap();
        let scene =
            TargetScene::from_pairs(&[(0.0, 100.0), (60.0, 1.0), (25.0, 1.0)]).unwrap();
        let a = magnitude_squared(&noiseless(&geom, &scene));
        let comps = expand_harmonics(&geom, &scene);
        for (n, v) in a.values().iter().enumerate() {
            let e = evaluate_harmonics(&comps, n as i64);
            assert!((v - e).abs() <= 1e-9 * e.abs(), "n={n}: {v} vs {e}");
        }
    }

    #[test]
    fn snr_conversion() {
        assert!((snr_from_noise_var(0.04).unwrap() - 13.979_400_086_720_377).abs() < 1e-9);
        assert_eq!(snr_from_noise_var(1.0).unwrap(), 0.0);
        assert!((snr_from_noise_var(0.1).unwrap() - 10.0).abs() < 1e-12);
        assert!(snr_from_noise_var(0.0).is_err());
        assert!(snr_from_noise_var(-0.5).is_err());
    }

    #[test]
    fn scene_sampler_defaults() {
        let scene = SceneSampler::default().sample(7).unwrap();
        assert_eq!(scene.len(), 3);
        assert_eq!(*scene.reference(), Target::new(0.0, 100.0).unwrap());
        let angles = scene.unknown_angles();
        assert!(angles.iter().all(|a| (10.0..=90.0).contains(a)));
        assert!((angles[0] - angles[1]).abs() >= 5.0);
        assert!(scene.unknowns().all(|t| t.amplitude == 1.0));
        assert_eq!(SceneSampler::default().sample(7).unwrap(), scene);
    }

    #[test]
    fn scene_sampler_reference_only() {
        let scene = sample_scene(3, 0, 10.0, 90.0, 5.0, 100.0, 1.0).unwrap();
        assert_eq!(scene.len(), 1);
    }

    #[test]
    fn scene_sampler_infeasible() {
        let err = sample_scene(3, 3, 10.0, 20.0, 8.0, 100.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::SeparationInfeasible { count: 3, .. }));
    }
}
