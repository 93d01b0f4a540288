use serde::Serialize;

use super::dense::{norm2, svd};
use super::matrix::{norm, sub_vec, Matrix, C64};
use super::operator::OperatorMatrix;
use super::schur::{schur, Schur};
use crate::error::Result;

/// Powers probed by [`is_power_bounded`] for its bound estimate.
pub const POWER_PROBE_HORIZON: usize = 1000;

/// Computed eigenvalues closer than this (times `max(1, ‖T‖₂)`) are one cluster.
pub const CLUSTER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenvalueEntry {
    pub value: C64,
    pub algebraic_multiplicity: usize,
    /// Geometric multiplicity equals algebraic multiplicity (rank test).
    pub semisimple: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Sorted by modulus (descending), then argument.
    pub eigenvalues: Vec<EigenvalueEntry>,
    pub spectral_radius: f64,
}

impl Spectrum {
    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.algebraic_multiplicity).sum()
    }

    /// Distance from `z` to the nearest eigenvalue.
    pub fn distance_to(&self, z: C64) -> f64 {
        self.eigenvalues.iter().map(|e| (e.value - z).norm()).fold(f64::INFINITY, f64::min)
    }
}

/// Eigenvalue cluster with an orthonormal basis of its (numerical) eigenspace.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    pub value: C64,
    pub multiplicity: usize,
    pub vectors: Vec<Vec<C64>>,
    /// Largest `‖Tv − λv‖` over the basis.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub spectrum: Spectrum,
    pub eigenspaces: Vec<Eigenspace>,
    pub schur: Schur,
    pub norm2: f64,
}

fn cluster(values: &[C64], tol: f64) -> Vec<Vec<C64>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<C64>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(g) => groups[g].push(values[i]),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![values[i]]);
            }
        }
    }
    groups
}

fn canonical_order(a: &C64, b: &C64) -> std::cmp::Ordering {
    let key = |z: &C64| (z.norm() * 1e9).round();
    key(b).total_cmp(&key(a)).then_with(|| {
        let arg = |z: &C64| {
            let t = z.im.atan2(z.re);
            if t < -1e-12 {
                t + std::f64::consts::TAU
            } else {
                t.max(0.0)
            }
        };
        arg(a).total_cmp(&arg(b))
    })
}

/// Eigenvalues with multiplicities, eigenspace bases and the Schur form.
///
/// Semisimplicity compares the numerical rank of `T − λI` (threshold
/// `tol·‖T‖₂`) against `n − m_alg`.
pub fn eigen_decompose(op: &OperatorMatrix) -> Result<EigenDecomposition> {
    let t = op.matrix();
    let n = op.dim();
    let s = schur(t)?;
    let tnorm = norm2(t);
    let rank_tol = op.tol() * tnorm.max(f64::MIN_POSITIVE);
    let groups = cluster(&s.eigenvalues(), CLUSTER_TOL * tnorm.max(1.0));
    let mut spaces: Vec<Eigenspace> = groups
        .into_iter()
        .map(|g| {
            let value = g.iter().sum::<C64>() / g.len() as f64;
            let shifted = t - &Matrix::identity(n).scale(value);
            let d = svd(&shifted);
            let geometric = d.sigma.iter().filter(|&&x| x <= rank_tol).count().max(1);
            let vectors: Vec<Vec<C64>> = ((n - geometric)..n).map(|k| d.v.column(k)).collect();
            let residual = vectors
                .iter()
                .map(|v| norm(&sub_vec(&t.mul_vec(v), &v.iter().map(|x| x * value).collect::<Vec<_>>())))
                .fold(0.0, f64::max);
            Eigenspace { value, multiplicity: g.len(), vectors, residual }
        })
        .collect();
    spaces.sort_by(|a, b| canonical_order(&a.value, &b.value));
    let eigenvalues = spaces
        .iter()
        .map(|sp| EigenvalueEntry {
            value: sp.value,
            algebraic_multiplicity: sp.multiplicity,
            semisimple: sp.vectors.len() == sp.multiplicity,
        })
        .collect::<Vec<_>>();
    let spectral_radius = eigenvalues.iter().map(|e| e.value.norm()).fold(0.0, f64::max);
    Ok(EigenDecomposition {
        spectrum: Spectrum { eigenvalues, spectral_radius },
        eigenspaces: spaces,
        schur: s,
        norm2: tnorm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerBoundReport {
    pub power_bounded: bool,
    pub spectral_radius: f64,
    /// `max_{1 ≤ n ≤ horizon} ‖Tⁿ‖_F`.
    pub bound_estimate: f64,
    pub probe_horizon: usize,
}

/// Spectral criterion only: `r(T) ≤ 1 + tol` and every eigenvalue with
/// `|λ| ≥ 1 − tol` is semisimple.
pub fn spectrally_power_bounded(op: &OperatorMatrix, eig: &EigenDecomposition) -> bool {
    let tol = op.tol();
    eig.spectrum.spectral_radius <= 1.0 + tol
        && eig.spectrum.eigenvalues.iter().filter(|e| e.value.norm() >= 1.0 - tol).all(|e| e.semisimple)
}

pub fn is_power_bounded(op: &OperatorMatrix) -> Result<PowerBoundReport> {
    let eig = eigen_decompose(op)?;
    let bounded = spectrally_power_bounded(op, &eig);
    let t = op.matrix();
    let mut power = t.clone();
    let mut bound = power.frobenius_norm();
    for _ in 1..POWER_PROBE_HORIZON {
        power = power.matmul(t);
        let f = power.frobenius_norm();
        if !f.is_finite() {
            bound = f64::INFINITY;
            break;
        }
        bound = bound.max(f);
        if f == 0.0 {
            break;
        }
    }
    Ok(PowerBoundReport {
        power_bounded: bounded,
        spectral_radius: eig.spectrum.spectral_radius,
        bound_estimate: bound,
        probe_horizon: POWER_PROBE_HORIZON,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, TAU};

    fn op(m: Matrix) -> OperatorMatrix {
        OperatorMatrix::with_default_tol(m).unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let e = eigen_decompose(&op(Matrix::identity(3))).unwrap();
        assert_eq!(e.spectrum.eigenvalues.len(), 1);
        assert_eq!(e.spectrum.eigenvalues[0].algebraic_multiplicity, 3);
        assert!((e.spectrum.eigenvalues[0].value - 1.0).norm() < 1e-15);
        assert!(e.spectrum.eigenvalues[0].semisimple);
        assert_eq!(e.spectrum.spectral_radius, 1.0);
    }

    #[test]
    fn diagonal_spectrum() {
        let e = eigen_decompose(&op(Matrix::diag(&[C64::new(0.5, 0.0), C64::new(0.0, 1.0)]))).unwrap();
        let vals: Vec<C64> = e.spectrum.eigenvalues.iter().map(|x| x.value).collect();
        assert!((vals[0] - C64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((vals[1] - 0.5).norm() < 1e-14);
        assert!((e.spectrum.spectral_radius - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cyclic_permutation_roots_of_unity() {
        let p = Matrix::from_real_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]]);
        let e = eigen_decompose(&op(p.clone())).unwrap();
        assert_eq!(e.spectrum.eigenvalues.len(), 3);
        for (k, ev) in e.spectrum.eigenvalues.iter().enumerate() {
            let expected = C64::from_polar(1.0, TAU * k as f64 / 3.0);
            assert!((ev.value - expected).norm() < 1e-12, "{:?}", ev.value);
        }
        for sp in &e.eigenspaces {
            assert!(sp.residual <= 1e-9 * e.norm2);
        }
    }

    #[test]
    fn power_bounded_examples() {
        let id = is_power_bounded(&op(Matrix::identity(1))).unwrap();
        assert!(id.power_bounded);
        assert!((id.bound_estimate - 1.0).abs() < 1e-15);

        let jordan = Matrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]);
        let j = is_power_bounded(&op(jordan)).unwrap();
        assert!(!j.power_bounded);
        assert!(j.bound_estimate > 999.0);

        let d = Matrix::diag(&[C64::new(0.9, 0.0), C64::from_polar(1.0, FRAC_PI_4)]);
        let r = is_power_bounded(&op(d)).unwrap();
        assert!(r.power_bounded);
        assert!(r.bound_estimate <= 2f64.sqrt() + 1e-12);
    }

    #[test]
    fn spectral_radius_above_one_rejected() {
        let r = is_power_bounded(&op(Matrix::diag(&[C64::new(1.01, 0.0)]))).unwrap();
        assert!(!r.power_bounded);
    }
}
