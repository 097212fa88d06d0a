//! Direction-of-arrival estimation from magnitude-only measurements of a
//! uniform linear array.
//!
//! The squared magnitude of the array output, read along the element index,
//! is a sum of cosines whose frequencies depend on pairwise differences of
//! `cos(theta)`. With one strong reference target at a known low angle the
//! largest spectral peaks belong to the reference cross terms, and each peak
//! frequency inverts directly to one unknown angle.
//!
//! ```
//! use ncdoa::signal_model::*;
//! use ncdoa::spectral::{estimate_doas, EstimatorConfig};
//!
//! let geometry = ArrayGeometry::half_wavelength(200).unwrap();
//! let scene = TargetScene::from_pairs(&[(0.0, 100.0), (60.0, 1.0), (25.0, 1.0)]).unwrap();
//! let snap = simulate_snapshot(&geometry, &scene, &NoiseModel::noiseless(), &PhaseErrorModel::none(), 1)
//!     .unwrap();
//! let est = estimate_doas(&magnitude_squared(&snap), &EstimatorConfig::with_unknowns(2), 0.5).unwrap();
//! assert!((est.angles_deg[0] - 25.0).abs() < 0.5);
//! assert!((est.angles_deg[1] - 60.0).abs() < 0.5);
//! ```
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]

extern crate alloc;

pub mod assignment;
pub mod enhancement;
pub mod error;
pub mod fft;
pub mod omp;
pub mod signal_model;
pub mod spectral;

pub use error::{Error, Result};
