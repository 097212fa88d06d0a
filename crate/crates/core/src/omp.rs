//! Coherent on-grid baseline: simultaneous orthogonal matching pursuit over
//! a dictionary of ULA steering vectors.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::assignment::optimal_assignment;
use crate::error::{Error, Result};
use crate::signal_model::{ArrayGeometry, SnapshotSet, TargetScene};

/// Basis vectors shorter than this after orthogonalization are treated as
/// linearly dependent on the atoms already selected.
const DEPENDENCE_TOL: f64 = 1e-8;

/// Scores within this relative margin count as ties, won by the lower grid
/// index. At half-wavelength spacing the 0 and 180 degree atoms coincide.
const TIE_REL: f64 = 1e-9;

/// Unit-norm steering vectors on a uniform angle grid over `[0, 180]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringDictionary {
    grid_angles_deg: Vec<f64>,
    atoms: Vec<Vec<Complex64>>,
}

impl SteeringDictionary {
    pub fn grid_angles_deg(&self) -> &[f64] {
        &self.grid_angles_deg
    }

    pub fn atoms(&self) -> &[Vec<Complex64>] {
        &self.atoms
    }

    pub fn num_bins(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_len(&self) -> usize {
        self.atoms.first().map_or(0, Vec::len)
    }
}

pub fn build_dictionary(geometry: &ArrayGeometry, num_bins: usize) -> Result<SteeringDictionary> {
    if num_bins < 2 {
        return Err(Error::TooFewBins(num_bins));
    }
    let len = geometry.num_elements();
    let scale = 1.0 / (len as f64).sqrt();
    let step = 180.0 / (num_bins - 1) as f64;
    let grid_angles_deg: Vec<f64> = (0..num_bins)
        .map(|j| if j + 1 == num_bins { 180.0 } else { j as f64 * step })
        .collect();
    let atoms = grid_angles_deg
        .iter()
        .map(|angle| {
            let freq = geometry.spacing_ratio() * angle.to_radians().cos();
            (0..len)
                .map(|n| Complex64::from_polar(scale, 2.0 * PI * (n as f64 * freq).fract()))
                .collect()
        })
        .collect();
    Ok(SteeringDictionary {
        grid_angles_deg,
        atoms,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmpResult {
    /// Grid angles of the chosen atoms, ascending.
    pub selected_angles_deg: Vec<f64>,
    /// Dictionary indices in selection order.
    pub selected_indices: Vec<usize>,
    /// Total residual norm over all snapshots after the last iteration.
    pub residual_norm: f64,
    /// Residual norm before the first and after every iteration.
    pub residual_history: Vec<f64>,
    /// Set when a selected atom was numerically dependent on earlier ones.
    pub ill_conditioned: bool,
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn total_norm(residuals: &[Vec<Complex64>]) -> f64 {
    residuals
        .iter()
        .flat_map(|r| r.iter())
        .map(|c| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Runs `sparsity` iterations of simultaneous OMP. Each iteration picks the
/// atom maximizing `sum_t |<atom, r_t>|^2` and re-projects every snapshot
/// onto the span of all atoms picked so far.
pub fn omp_estimate(
    snapshots: &SnapshotSet,
    dict: &SteeringDictionary,
    sparsity: usize,
) -> Result<OmpResult> {
    if sparsity == 0 || sparsity > dict.num_bins() {
        return Err(Error::InvalidSparsity {
            sparsity,
            bins: dict.num_bins(),
        });
    }
    if snapshots.is_empty() {
        return Err(Error::NoSnapshots);
    }
    let len = dict.atom_len();
    for snap in &snapshots.snapshots {
        if snap.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                found: snap.len(),
            });
        }
    }

    let mut residuals: Vec<Vec<Complex64>> =
        snapshots.snapshots.iter().map(|s| s.samples.clone()).collect();
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(sparsity);
    let mut selected: Vec<usize> = Vec::with_capacity(sparsity);
    let mut taken = vec![false; dict.num_bins()];
    let mut history = vec![total_norm(&residuals)];
    let mut ill_conditioned = false;

    for _ in 0..sparsity {
        let mut best: Option<(usize, f64)> = None;
        for (j, atom) in dict.atoms().iter().enumerate() {
            if taken[j] {
                continue;
            }
            let score: f64 = residuals.iter().map(|r| inner(atom, r).norm_sqr()).sum();
            if best.is_none_or(|(_, b)| score > b * (1.0 + TIE_REL)) {
                best = Some((j, score));
            }
        }
        let (j, _) = best.expect("sparsity <= num_bins leaves a free atom");
        taken[j] = true;
        selected.push(j);

        // Gram-Schmidt twice for numerical orthogonality
        let mut q = dict.atoms()[j].clone();
        for _ in 0..2 {
            for b in &basis {
                let proj = inner(b, &q);
                q.iter_mut().zip(b).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let norm = q.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < DEPENDENCE_TOL {
            ill_conditioned = true;
            history.push(total_norm(&residuals));
            continue;
        }
        q.iter_mut().for_each(|x| *x /= norm);
        for r in &mut residuals {
            let proj = inner(&q, r);
            r.iter_mut().zip(&q).for_each(|(x, y)| *x -= proj * y);
        }
        basis.push(q);
        history.push(total_norm(&residuals));
    }

    let mut selected_angles_deg: Vec<f64> =
        selected.iter().map(|&j| dict.grid_angles_deg()[j]).collect();
    selected_angles_deg.sort_by(f64::total_cmp);
    Ok(OmpResult {
        selected_angles_deg,
        selected_indices: selected,
        residual_norm: *history.last().expect("history is never empty"),
        residual_history: history,
        ill_conditioned,
    })
}

/// Pairs OMP estimates with the non-reference truth angles.
///
/// The estimate closest to the reference angle is attributed to the
/// reference and dropped; the rest are matched to the unknown targets by
/// minimum total squared error. Returns `(truth, estimate)` pairs in scene
/// order.
pub fn baseline_mse_angles(result: &OmpResult, truth: &TargetScene) -> Vec<(f64, f64)> {
    let ref_angle = truth.reference().angle_deg;
    let mut estimates = result.selected_angles_deg.clone();
    if let Some(closest) = estimates
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - ref_angle)
                .abs()
                .total_cmp(&(b.1 - ref_angle).abs())
                .then(a.0.cmp(&b.0))
        })
        .map(|(i, _)| i)
    {
        estimates.remove(closest);
    }
    let truths = truth.unknown_angles();
    match optimal_assignment(&truths, &estimates) {
        Some(assign) => truths
            .iter()
            .zip(assign)
            .map(|(t, e)| (*t, estimates[e]))
            .collect(),
        None => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal_model::*;

    #[test]
    fn small_dictionary() {
        let geom = ArrayGeometry::half_wavelength(4).unwrap();
        let dict = build_dictionary(&geom, 3).unwrap();
        assert_eq!(dict.grid_angles_deg(), &[0.0, 90.0, 180.0]);
        for c in &dict.atoms()[1] {
            assert!((c - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
        for (a, b) in dict.atoms()[0].iter().zip(&dict.atoms()[2]) {
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn full_size_dictionary_is_unit_norm() {
        let geom = ArrayGeometry::half_wavelength(200).unwrap();
        let dict = build_dictionary(&geom, 200).unwrap();
        assert_eq!(dict.num_bins(), 200);
        for atom in dict.atoms() {
            let norm: f64 = atom.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        assert!(dict.grid_angles_deg().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_bad_arguments() {
        let geom = ArrayGeometry::half_wavelength(8).unwrap();
        assert_eq!(build_dictionary(&geom, 1), Err(Error::TooFewBins(1)));
        let dict = build_dictionary(&geom, 10).unwrap();
        let scene = TargetScene::from_pairs(&[(40.0, 1.0)]).unwrap();
        let set = simulate_snapshot_set(
            &geom,
            &scene,
            &NoiseModel::noiseless(),
            &PhaseErrorModel::none(),
            1,
            0,
        )
        .unwrap();
        assert!(matches!(
            omp_estimate(&set, &dict, 0),
            Err(Error::InvalidSparsity { sparsity: 0, .. })
        ));
        assert!(matches!(
            omp_estimate(&set, &dict, 11),
            Err(Error::InvalidSparsity { sparsity: 11, .. })
        ));
        let other = build_dictionary(&ArrayGeometry::half_wavelength(9).unwrap(), 10).unwrap();
        assert!(matches!(
            omp_estimate(&set, &other, 1),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn dependent_atoms_are_flagged() {
        // a 2-element array cannot hold 3 independent atoms
        let geom = ArrayGeometry::half_wavelength(2).unwrap();
        let dict = build_dictionary(&geom, 5).unwrap();
        let scene = TargetScene::from_pairs(&[(45.0, 1.0)]).unwrap();
        let set = simulate_snapshot_set(
            &geom,
            &scene,
            &NoiseModel::new(0.1).unwrap(),
            &PhaseErrorModel::none(),
            2,
            3,
        )
        .unwrap();
        let res = omp_estimate(&set, &dict, 4).unwrap();
        assert!(res.ill_conditioned);
        assert_eq!(res.selected_indices.len(), 4);
        assert!(res.residual_norm < 1e-9);
    }

    #[test]
    fn matching_drops_reference() {
        let scene = TargetScene::from_pairs(&[(0.0, 100.0), (25.0, 1.0), (60.0, 1.0)]).unwrap();
        let result = |angles: &[f64]| OmpResult {
            selected_angles_deg: angles.to_vec(),
            selected_indices: Vec::new(),
            residual_norm: 0.0,
            residual_history: Vec::new(),
            ill_conditioned: false,
        };
        assert_eq!(
            baseline_mse_angles(&result(&[0.0, 25.0, 60.0]), &scene),
            vec![(25.0, 25.0), (60.0, 60.0)]
        );
        assert_eq!(
            baseline_mse_angles(&result(&[0.9, 26.0, 59.0]), &scene),
            vec![(25.0, 26.0), (60.0, 59.0)]
        );
        assert_eq!(
            baseline_mse_angles(&result(&[59.0, 0.9, 26.0]), &scene),
            vec![(25.0, 26.0), (60.0, 59.0)]
        );
    }
}
