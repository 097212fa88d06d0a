//! Virtual array elements and multi-snapshot integration.
//!
//! `a_n` is band-limited to `(d / lambda)` cycles per element when all
//! angles lie in `[0, 90]`, so for `d <= lambda / 2` it can be resampled at
//! fractional element positions with a sinc sum.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::signal_model::{ArrayGeometry, MagnitudeSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VirtualArrayConfig {
    pub upsample_factor: usize,
    /// Original samples used per side of each output point; `None` sums
    /// over the whole sequence.
    pub interpolation_halfwidth: Option<usize>,
    /// Interpolate deviations from the sample mean and add the mean back.
    /// A truncated sinc sum rings on a constant; `a_n` carries a large one
    /// (the reference power), and its ringing alternates in sign from one
    /// element to the next, which puts a spurious tone at the original
    /// Nyquist frequency. Off gives the plain sum.
    pub subtract_mean: bool,
}

impl Default for VirtualArrayConfig {
    fn default() -> Self {
        Self {
            upsample_factor: 2,
            interpolation_halfwidth: None,
            subtract_mean: true,
        }
    }
}

/// True when `a_n` is sampled above Nyquist for angles in `[0, 90]`:
/// its bandwidth is `spacing_ratio` cycles per element, which must not
/// exceed 0.5.
pub fn verify_sampling(geometry: &ArrayGeometry) -> bool {
    geometry.spacing_ratio() <= 0.5
}

/// Resamples `a` at `s = m / factor` for `m = 0 ..= factor (N - 1)` using
/// `a(s) = sum_n a_n sinc(s - n)`, or `mean + sum_n (a_n - mean) sinc(s - n)`
/// with `subtract_mean`.
///
/// Original samples are copied through unchanged; undershoot below zero is
/// clamped.
pub fn sinc_interpolate(a: &MagnitudeSequence, cfg: &VirtualArrayConfig) -> Result<MagnitudeSequence> {
    let factor = cfg.upsample_factor;
    if factor == 0 {
        return Err(Error::InvalidUpsampleFactor);
    }
    let values = a.values();
    if factor == 1 || values.len() < 2 {
        return Ok(a.clone());
    }
    let len = values.len();
    let out_len = factor * (len - 1) + 1;

    let offset = if cfg.subtract_mean {
        values.iter().sum::<f64>() / len as f64
    } else {
        0.0
    };
    // sin(pi (s - n)) = (-1)^n sin(pi s), so the sum needs one sine per output
    let alternating: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(n, v)| if n % 2 == 0 { v - offset } else { offset - v })
        .collect();

    let mut out = vec![0.0; out_len];
    for (m, slot) in out.iter_mut().enumerate() {
        let whole = m / factor;
        let rem = m % factor;
        if rem == 0 {
            *slot = values[whole];
            continue;
        }
        let frac = rem as f64 / factor as f64;
        let s = whole as f64 + frac;
        let sin_pi_s = if whole.is_multiple_of(2) { 1.0 } else { -1.0 } * (PI * frac).sin();

        let (lo, hi) = match cfg.interpolation_halfwidth {
            Some(h) => (whole.saturating_sub(h.saturating_sub(1)), (whole + h).min(len - 1)),
            None => (0, len - 1),
        };
        let sum: f64 = (lo..=hi).map(|n| alternating[n] / (s - n as f64)).sum();
        *slot = (offset + sin_pi_s / PI * sum).max(0.0);
    }
    Ok(MagnitudeSequence::from_nonnegative(out))
}

/// Element-wise mean of equally long magnitude sequences.
pub fn integrate_snapshots(sequences: &[MagnitudeSequence]) -> Result<MagnitudeSequence> {
    let first = sequences.first().ok_or(Error::NothingToIntegrate)?;
    let len = first.len();
    let mut acc = vec![0.0; len];
    for seq in sequences {
        if seq.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                found: seq.len(),
            });
        }
        for (a, v) in acc.iter_mut().zip(seq.values()) {
            *a += v;
        }
    }
    let count = sequences.len() as f64;
    acc.iter_mut().for_each(|a| *a /= count);
    Ok(MagnitudeSequence::from_nonnegative(acc))
}
