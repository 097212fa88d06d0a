//! Direction finding from the spectrum of a magnitude-squared sequence.
//!
//! With a dominant reference target, the largest non-DC peaks of the
//! spectrum of `a_n` are the reference cross terms. Each sits at
//! `f = (d / lambda) |cos(theta) - cos(theta_ref)|`, which inverts to an
//! angle in `[0, 90]` degrees.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft;
use crate::signal_model::{MagnitudeSequence, TargetScene};

/// Peaks below this fraction of `sum |a_n|` are treated as numerical residue.
pub const PEAK_FLOOR_REL: f64 = 1e-10;

/// Normalized frequency of the cross term between two targets:
/// `spacing_ratio * |cos(theta_i) - cos(theta_j)|`.
pub fn pair_frequency(theta_i_deg: f64, theta_j_deg: f64, spacing_ratio: f64) -> f64 {
    spacing_ratio * (theta_i_deg.to_radians().cos() - theta_j_deg.to_radians().cos()).abs()
}

/// Zero-padded magnitude spectrum of a mean-removed real sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// `|DFT|` of the mean-removed, zero-padded sequence over all `L` bins.
    pub bin_magnitudes: Vec<f64>,
    /// `|sum_n a_n|`, the DC bin before mean removal.
    pub dc_magnitude: f64,
    pub padded_length: usize,
    pub original_length: usize,
    pub zero_pad_factor: usize,
}

impl Spectrum {
    /// Normalized frequency of bin `k` (cycles per sample).
    pub fn bin_frequency(&self, k: f64) -> f64 {
        k / self.padded_length as f64
    }

    /// Width of one unpadded DFT bin in padded bins, rounded up.
    pub fn padded_bins_per_raw_bin(&self) -> usize {
        self.padded_length.div_ceil(self.original_length).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPeak {
    pub normalized_frequency: f64,
    pub magnitude: f64,
    pub bin_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Number of non-reference targets, i.e. peaks to pick.
    pub num_unknown_targets: usize,
    pub zero_pad_factor: usize,
    /// Padded bins excluded next to DC; `None` means one raw bin
    /// (`zero_pad_factor` padded bins).
    pub dc_guard_bins: Option<usize>,
    pub refine: bool,
    pub ref_angle_deg: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            num_unknown_targets: 2,
            zero_pad_factor: 8,
            dc_guard_bins: None,
            refine: true,
            ref_angle_deg: 0.0,
        }
    }
}

impl EstimatorConfig {
    pub fn with_unknowns(num_unknown_targets: usize) -> Self {
        Self {
            num_unknown_targets,
            ..Self::default()
        }
    }

    pub fn guard_bins(&self) -> usize {
        self.dc_guard_bins.unwrap_or(self.zero_pad_factor).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_unknown_targets == 0 {
            return Err(Error::InvalidPeakCount);
        }
        if self.zero_pad_factor == 0 {
            return Err(Error::InvalidPadFactor);
        }
        if !(0.0..=180.0).contains(&self.ref_angle_deg) {
            return Err(Error::InvalidAngle(self.ref_angle_deg));
        }
        Ok(())
    }
}

/// Angle estimates, ascending, with the peak frequency each came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DoaEstimate {
    pub angles_deg: Vec<f64>,
    pub peak_frequencies: Vec<f64>,
}

/// Transform length: `zero_pad_factor` times the next power of two `>= len`.
pub fn padded_length(len: usize, zero_pad_factor: usize) -> usize {
    zero_pad_factor * len.next_power_of_two()
}

pub fn compute_spectrum(a: &MagnitudeSequence, zero_pad_factor: usize) -> Result<Spectrum> {
    let values = a.values();
    if values.len() < 2 {
        return Err(Error::SequenceTooShort(values.len()));
    }
    if zero_pad_factor == 0 {
        return Err(Error::InvalidPadFactor);
    }
    let total: f64 = values.iter().sum();
    let mean = total / values.len() as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let padded = padded_length(values.len(), zero_pad_factor);
    Ok(Spectrum {
        bin_magnitudes: fft::real_magnitudes(&centered, padded),
        dc_magnitude: total.abs(),
        padded_length: padded,
        original_length: values.len(),
        zero_pad_factor,
    })
}

/// The `count` largest peaks in bins `[dc_guard_bins, L/2]`, at least one
/// raw bin apart, by descending magnitude.
///
/// A bin qualifies as a peak when it is a strict local maximum and nothing
/// within one raw bin on either side is larger. The second condition rejects
/// the sidelobes of the rectangular window, which are local maxima of the
/// zero-padded spectrum but always sit next to a larger inner lobe.
pub fn find_peaks(spec: &Spectrum, count: usize, dc_guard_bins: usize) -> Result<Vec<SpectralPeak>> {
    find_peaks_below(spec, count, dc_guard_bins, spec.padded_length / 2)
}

/// [`find_peaks`] with the search stopping at `max_bin` (capped at `L/2`).
pub fn find_peaks_below(
    spec: &Spectrum,
    count: usize,
    dc_guard_bins: usize,
    max_bin: usize,
) -> Result<Vec<SpectralPeak>> {
    if count == 0 {
        return Err(Error::InvalidPeakCount);
    }
    let mags = &spec.bin_magnitudes;
    let len = spec.padded_length;
    let floor = PEAK_FLOOR_REL * spec.dc_magnitude.max(f64::MIN_POSITIVE);
    let lo = dc_guard_bins.max(1);
    let hi = max_bin.min(len / 2);
    let raw_bin = spec.padded_bins_per_raw_bin();

    let mut candidates: Vec<SpectralPeak> = (lo..=hi)
        .filter(|&k| {
            let m = mags[k];
            m > floor
                && m > mags[k - 1]
                && m > mags[(k + 1) % len]
                && (1..=raw_bin).all(|d| m >= mags[(k + d) % len] && m >= mags[(k + len - d) % len])
        })
        .map(|k| SpectralPeak {
            normalized_frequency: spec.bin_frequency(k as f64),
            magnitude: mags[k],
            bin_index: k,
        })
        .collect();
    // ties go to the lower frequency
    candidates.sort_by(|a, b| {
        b.magnitude
            .total_cmp(&a.magnitude)
            .then(a.bin_index.cmp(&b.bin_index))
    });

    let separation = spec.zero_pad_factor;
    let mut picked: Vec<SpectralPeak> = Vec::with_capacity(count);
    for cand in candidates {
        if picked.len() == count {
            break;
        }
        if picked.iter().all(|p| p.bin_index.abs_diff(cand.bin_index) >= separation) {
            picked.push(cand);
        }
    }
    if picked.len() < count {
        return Err(Error::InsufficientPeaks {
            requested: count,
            found: picked.len(),
        });
    }
    Ok(picked)
}

/// Sub-bin peak frequency from a parabola through the log-magnitudes of the
/// bin and its two neighbours. Falls back to the bin centre when a
/// neighbour is missing or zero, or the three points are not concave.
pub fn refine_peak(spec: &Spectrum, bin_index: usize) -> f64 {
    let center = spec.bin_frequency(bin_index as f64);
    let mags = &spec.bin_magnitudes;
    if bin_index == 0 || bin_index + 1 >= mags.len() {
        return center;
    }
    let (left, mid, right) = (mags[bin_index - 1], mags[bin_index], mags[bin_index + 1]);
    if !(left > 0.0 && mid > 0.0 && right > 0.0) {
        return center;
    }
    let (l, m, r) = (left.ln(), mid.ln(), right.ln());
    let curvature = l - 2.0 * m + r;
    if curvature.is_nan() || curvature >= 0.0 {
        return center;
    }
    let delta = (0.5 * (l - r) / curvature).clamp(-1.0, 1.0);
    spec.bin_frequency(bin_index as f64 + delta)
}

/// Inverts a reference cross-term frequency to an angle in `[0, 90]` degrees.
pub fn frequency_to_doa(f_tilde: f64, ref_angle_deg: f64, spacing_ratio: f64) -> f64 {
    let arg = (ref_angle_deg.to_radians().cos() - f_tilde / spacing_ratio).clamp(-1.0, 1.0);
    arg.acos().to_degrees().clamp(0.0, 90.0)
}

/// Highest bin worth searching: the cross term of a target at 90 deg, plus
/// one raw bin of slack. Only bites when elements are closer than λ/2
/// (virtual arrays), where the band above it holds nothing but
/// interpolation images.
fn search_limit_bin(spec: &Spectrum, ref_angle_deg: f64, spacing_ratio: f64) -> usize {
    let f_max = spacing_ratio * ref_angle_deg.to_radians().cos();
    let bin = (f_max * spec.padded_length as f64).ceil();
    if bin.is_finite() && bin >= 0.0 {
        bin as usize + spec.padded_bins_per_raw_bin()
    } else {
        spec.padded_length / 2
    }
}

/// Full pipeline: spectrum, peak picking, optional refinement, inversion.
pub fn estimate_doas(
    a: &MagnitudeSequence,
    cfg: &EstimatorConfig,
    spacing_ratio: f64,
) -> Result<DoaEstimate> {
    cfg.validate()?;
    if !(spacing_ratio > 0.0 && spacing_ratio.is_finite()) {
        return Err(Error::InvalidSpacing(spacing_ratio));
    }
    let spec = compute_spectrum(a, cfg.zero_pad_factor)?;
    let peaks = find_peaks_below(
        &spec,
        cfg.num_unknown_targets,
        cfg.guard_bins(),
        search_limit_bin(&spec, cfg.ref_angle_deg, spacing_ratio),
    )?;
    let mut pairs: Vec<(f64, f64)> = peaks
        .iter()
        .map(|p| {
            let f = if cfg.refine {
                refine_peak(&spec, p.bin_index)
            } else {
                p.normalized_frequency
            };
            (frequency_to_doa(f, cfg.ref_angle_deg, spacing_ratio), f)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(DoaEstimate {
        angles_deg: pairs.iter().map(|p| p.0).collect(),
        peak_frequencies: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Whether the weakest reference cross term beats the strongest cross term
/// between two unknowns: `|x_ref| > max|x_k|^2 / min|x_m|`.
pub fn check_reference_dominance(scene: &TargetScene) -> Result<bool> {
    if scene.len() < 2 {
        return Err(Error::SingleTargetScene);
    }
    let (mut max_amp, mut min_amp) = (f64::MIN, f64::MAX);
    for t in scene.unknowns() {
        max_amp = max_amp.max(t.amplitude);
        min_amp = min_amp.min(t.amplitude);
    }
    Ok(scene.reference().amplitude > max_amp * max_amp / min_amp)
}
