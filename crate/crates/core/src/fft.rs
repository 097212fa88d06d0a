//! Forward discrete Fourier transform for arbitrary lengths.
//!
//! Power-of-two lengths run an iterative radix-2 Cooley-Tukey transform.
//! Other lengths go through Bluestein's chirp-z identity on top of the
//! radix-2 kernel, so every length costs O(L log L).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

/// Computes `X[k] = sum_n x[n] exp(-2 pi i k n / L)` in place.
pub fn forward(data: &mut [Complex64]) {
    let len = data.len();
    if len <= 1 {
        return;
    }
    if len.is_power_of_two() {
        radix2(data, false);
    } else {
        bluestein(data);
    }
}

fn radix2(data: &mut [Complex64], inverse: bool) {
    let len = data.len();
    debug_assert!(len.is_power_of_two());

    let mut j = 0usize;
    for i in 1..len {
        let mut bit = len >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }

    let sign = if inverse { 1.0 } else { -1.0 };
    let mut size = 2;
    while size <= len {
        let half = size / 2;
        let step = sign * 2.0 * PI / size as f64;
        // twiddles computed directly per index to avoid drift from repeated products
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| Complex64::from_polar(1.0, step * k as f64))
            .collect();
        for start in (0..len).step_by(size) {
            for k in 0..half {
                let even = data[start + k];
                let odd = data[start + k + half] * twiddles[k];
                data[start + k] = even + odd;
                data[start + k + half] = even - odd;
            }
        }
        size <<= 1;
    }
}

fn bluestein(data: &mut [Complex64]) {
    let len = data.len();
    let conv_len = (2 * len - 1).next_power_of_two();

    // chirp[n] = exp(-i pi n^2 / L); n^2 reduced mod 2L keeps the argument small
    let modulus = 2 * len as u128;
    let chirp: Vec<Complex64> = (0..len)
        .map(|n| {
            let sq = ((n as u128 * n as u128) % modulus) as f64;
            Complex64::from_polar(1.0, -PI * sq / len as f64)
        })
        .collect();

    let mut a = vec![Complex64::new(0.0, 0.0); conv_len];
    for (n, (slot, x)) in a.iter_mut().zip(data.iter()).enumerate() {
        *slot = *x * chirp[n];
    }

    let mut b = vec![Complex64::new(0.0, 0.0); conv_len];
    b[0] = chirp[0].conj();
    for n in 1..len {
        let c = chirp[n].conj();
        b[n] = c;
        b[conv_len - n] = c;
    }

    radix2(&mut a, false);
    radix2(&mut b, false);
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x *= *y;
    }
    radix2(&mut a, true);

    let scale = 1.0 / conv_len as f64;
    for (k, out) in data.iter_mut().enumerate() {
        *out = a[k] * chirp[k] * scale;
    }
}

/// Magnitude of the transform of a real sequence zero-padded to `padded_len`.
pub(crate) fn real_magnitudes(values: &[f64], padded_len: usize) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); padded_len];
    for (slot, &v) in buf.iter_mut().zip(values) {
        slot.re = v;
    }
    forward(&mut buf);
    buf.iter().map(|c| c.norm()).collect()
}
