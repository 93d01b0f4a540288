//! Peripheral spectrum `{λ ∈ σ(T) : |λ| = r(T)}` as a set of angles, and its
//! cyclicity.

use std::f64::consts::TAU;

use serde::Serialize;
use serde_json::json;

use super::frobenius::frobenius_oracle;
use crate::error::Result;
use crate::linalg::{eigen_decompose, OperatorMatrix};
use crate::report::CheckBlock;

pub const TOL_RADIUS_REL: f64 = 1e-8;
pub const TOL_ANGLE: f64 = 1e-6;
pub const K_MAX_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeripheralSpectrum {
    pub radius: f64,
    /// Sorted, in `[0, 2π)`.
    pub angles: Vec<f64>,
    pub tol_r: f64,
    pub tol_angle: f64,
}

/// Distance on the circle `ℝ / 2πℤ`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Sort angles into `[0, 2π)` and merge those within `tol` of each other.
pub fn cluster_angles(raw: impl IntoIterator<Item = f64>, tol: f64) -> Vec<f64> {
    let mut a: Vec<f64> = raw
        .into_iter()
        .map(|t| {
            let t = t.rem_euclid(TAU);
            if TAU - t <= tol {
                0.0
            } else {
                t
            }
        })
        .collect();
    a.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for t in a {
        if out.last().is_none_or(|&l| circular_distance(l, t) > tol) {
            out.push(t);
        }
    }
    out
}

/// Zero radius is reported for nilpotent `T` (`Tⁿ` vanishes numerically),
/// in which case the angle set is empty.
pub fn peripheral_spectrum(op: &OperatorMatrix, tol_radius_rel: f64, tol_angle: f64) -> Result<PeripheralSpectrum> {
    let t = op.matrix();
    let n = op.dim();
    let scale = t.frobenius_norm().max(1.0);
    let nilpotent = t.pow(n as u64).frobenius_norm() <= 1e-12 * scale.powi(n as i32);
    if nilpotent {
        return Ok(PeripheralSpectrum { radius: 0.0, angles: Vec::new(), tol_r: tol_radius_rel, tol_angle });
    }
    let eig = eigen_decompose(op)?;
    let values = eig.schur.eigenvalues();
    let r = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol_r = tol_radius_rel * (1.0 + r);
    let angles = cluster_angles(values.iter().filter(|z| z.norm() >= r - tol_r).map(|z| z.im.atan2(z.re)), tol_angle);
    Ok(PeripheralSpectrum { radius: r, angles, tol_r, tol_angle })
}

pub fn peripheral_spectrum_default(op: &OperatorMatrix) -> Result<PeripheralSpectrum> {
    peripheral_spectrum(op, TOL_RADIUS_REL, TOL_ANGLE)
}

/// `min(2·n!, 64)`.
pub fn default_k_max(n: usize) -> usize {
    let mut f: usize = 2;
    for k in 2..=n {
        f = f.saturating_mul(k);
        if f >= K_MAX_CAP {
            return K_MAX_CAP;
        }
    }
    f.min(K_MAX_CAP)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cyclicity {
    pub cyclic: bool,
    /// `(θ, k)` with `kθ` not among the angles.
    pub violations: Vec<(f64, usize)>,
}

pub fn check_cyclicity(ps: &PeripheralSpectrum, k_max: usize) -> Cyclicity {
    let mut violations = Vec::new();
    for &theta in &ps.angles {
        for k in 1..=k_max {
            let target = theta * k as f64;
            if !ps.angles.iter().any(|&a| circular_distance(a, target) <= ps.tol_angle) {
                violations.push((theta, k));
            }
        }
    }
    Cyclicity { cyclic: violations.is_empty(), violations }
}

/// Peripheral spectrum, its cyclicity, and for nonnegative `T` agreement
/// with the combinatorial prediction.
pub fn cyclicity_report(op: &OperatorMatrix, k_max: Option<usize>) -> Result<CheckBlock> {
    let ps = peripheral_spectrum_default(op)?;
    let k_max = k_max.unwrap_or_else(|| default_k_max(op.dim()));
    let cyc = check_cyclicity(&ps, k_max);
    let mut block = CheckBlock::new("lattice.cyclicity")
        .condition("cyclic", cyc.cyclic)
        .certificates(json!({
            "radius": ps.radius,
            "angles": ps.angles,
            "k_max": k_max,
            "violations": cyc.violations,
        }));
    if op.is_nonnegative(op.tol()) {
        let oracle = frobenius_oracle(op)?;
        let agree = oracle.spectrum.angles.len() == ps.angles.len()
            && oracle
                .spectrum
                .angles
                .iter()
                .zip(&ps.angles)
                .all(|(a, b)| circular_distance(*a, *b) <= ps.tol_angle);
        block = block
            .condition("oracle_angles_agree", agree)
            .residual("oracle_radius_gap", (oracle.spectrum.radius - ps.radius).abs(), 1e-6 * (1.0 + ps.radius));
        if let serde_json::Value::Object(m) = &mut block.certificates {
            m.insert("oracle_angles".into(), json!(oracle.spectrum.angles));
            m.insert("oracle_periods".into(), json!(oracle.periods()));
        }
    } else {
        block = block.note("not entrywise nonnegative; combinatorial oracle skipped");
    }
    Ok(block)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn op(rows: &[Vec<f64>]) -> OperatorMatrix {
        OperatorMatrix::from_real_rows(rows).unwrap()
    }

    fn ps(angles: &[f64]) -> PeripheralSpectrum {
        PeripheralSpectrum { radius: 1.0, angles: angles.to_vec(), tol_r: 1e-8, tol_angle: TOL_ANGLE }
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    #[test]
    fn peripheral_examples() {
        let c3 = op(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]]);
        let p = peripheral_spectrum_default(&c3).unwrap();
        assert!((p.radius - 1.0).abs() < 1e-12);
        assert!(close(&p.angles, &[0.0, TAU / 3.0, 2.0 * TAU / 3.0]));

        let swap = op(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(close(&peripheral_spectrum_default(&swap).unwrap().angles, &[0.0, PI]));

        let nil = op(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let p = peripheral_spectrum_default(&nil).unwrap();
        assert_eq!(p.radius, 0.0);
        assert!(p.angles.is_empty());
        assert!(check_cyclicity(&p, 4).cyclic);
    }

    #[test]
    fn cyclicity_examples() {
        assert!(check_cyclicity(&ps(&[0.0, TAU / 3.0, 2.0 * TAU / 3.0]), 12).cyclic);
        let c = check_cyclicity(&ps(&[0.0, PI / 2.0]), 4);
        assert!(!c.cyclic);
        assert_eq!(c.violations[0], (PI / 2.0, 2));
        let mixed = cluster_angles([0.0, PI, TAU / 3.0, 2.0 * TAU / 3.0], TOL_ANGLE);
        assert!(check_cyclicity(&ps(&mixed), 64).cyclic);
    }

    #[test]
    fn angle_clustering_wraps() {
        assert_eq!(cluster_angles([TAU - 1e-9, 0.0, 1e-9], 1e-6), vec![0.0]);
        assert!((circular_distance(0.1, TAU - 0.1) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn k_max_values() {
        assert_eq!(default_k_max(1), 2);
        assert_eq!(default_k_max(2), 4);
        assert_eq!(default_k_max(3), 12);
        assert_eq!(default_k_max(4), 48);
        assert_eq!(default_k_max(5), 64);
    }
}
