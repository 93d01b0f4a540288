use serde::Serialize;

use super::dense::orthonormalize;
use super::matrix::{inner, Matrix, C64, ZERO};
use super::operator::OperatorMatrix;
use super::schur::schur;
use crate::error::{Error, Result};

/// Minimum distance between the two eigenvalue groups of a split.
pub const SPLIT_GAP_THRESHOLD: f64 = 1e-3;

/// Orthonormal basis of a subspace of `ℂⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubspaceBasis {
    pub dim_ambient: usize,
    pub vectors: Vec<Vec<C64>>,
}

impl SubspaceBasis {
    pub fn new(dim_ambient: usize, vectors: Vec<Vec<C64>>) -> Self {
        debug_assert!(vectors.iter().all(|v| v.len() == dim_ambient));
        Self { dim_ambient, vectors }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// `n × k` matrix with the basis as columns.
    pub fn as_matrix(&self) -> Matrix {
        Matrix::from_columns(self.dim_ambient, &self.vectors)
    }

    /// Largest `|⟨vᵢ, vⱼ⟩ − δᵢⱼ|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((inner(a, b) - target).norm());
            }
        }
        worst
    }

    /// Orthogonal projector `B Bᴴ`.
    pub fn orthogonal_projector(&self) -> Matrix {
        let b = self.as_matrix();
        b.matmul(&b.adjoint())
    }
}

/// Two complementary `T`-invariant subspaces and the oblique projector onto the
/// first along the second.
#[derive(Debug, Clone)]
pub struct InvariantSplit {
    pub selected: SubspaceBasis,
    pub complement: SubspaceBasis,
    pub projector: Matrix,
    /// Smallest distance between a selected and an unselected eigenvalue.
    pub gap: f64,
    /// `‖(I − Π) T Π‖_F`.
    pub invariance_residual: f64,
}

/// Split `ℂⁿ` along the eigenvalues accepted by `predicate`.
///
/// Reorders the Schur form so the selected eigenvalues lead, then decouples
/// the off-diagonal block by solving the triangular Sylvester equation
/// `T₁₁ Y − Y T₂₂ = −T₁₂`. The projector in Schur coordinates is
/// `[[I, −Y], [0, 0]]`.
pub fn invariant_split(op: &OperatorMatrix, predicate: impl Fn(C64) -> bool) -> Result<InvariantSplit> {
    let n = op.dim();
    let t = op.matrix();
    let mut s = schur(t)?;
    let eig = s.eigenvalues();
    let select: Vec<bool> = eig.iter().map(|&z| predicate(z)).collect();
    let mut gap = f64::INFINITY;
    for (i, &a) in eig.iter().enumerate() {
        for (j, &b) in eig.iter().enumerate() {
            if select[i] && !select[j] {
                gap = gap.min((a - b).norm());
            }
        }
    }
    if gap < SPLIT_GAP_THRESHOLD {
        return Err(Error::IllConditionedSplit { gap, threshold: SPLIT_GAP_THRESHOLD });
    }
    let k = s.reorder(&select);
    let u = &s.t;
    let m = n - k;
    // Y is k × m, solved column by column.
    let mut y = Matrix::zeros(k, m);
    for j in 0..m {
        let mu = u[(k + j, k + j)];
        let mut rhs: Vec<C64> = (0..k).map(|i| -u[(i, k + j)]).collect();
        for l in 0..j {
            let coeff = u[(k + l, k + j)];
            if coeff != ZERO {
                for (i, r) in rhs.iter_mut().enumerate() {
                    *r += y[(i, l)] * coeff;
                }
            }
        }
        for i in (0..k).rev() {
            let mut acc = rhs[i];
            for l in (i + 1)..k {
                acc -= u[(i, l)] * y[(l, j)];
            }
            y[(i, j)] = acc / (u[(i, i)] - mu);
        }
    }
    let mut ps = Matrix::zeros(n, n);
    for i in 0..k {
        ps[(i, i)] = C64::new(1.0, 0.0);
        for j in 0..m {
            ps[(i, k + j)] = -y[(i, j)];
        }
    }
    let q = &s.q;
    let projector = q.matmul(&ps).matmul(&q.adjoint());

    let selected: Vec<Vec<C64>> = (0..k).map(|j| q.column(j)).collect();
    // complement spanned by Q [Y; I]
    let mut stacked = Matrix::zeros(n, m);
    for j in 0..m {
        for i in 0..k {
            stacked[(i, j)] = y[(i, j)];
        }
        stacked[(k + j, j)] = C64::new(1.0, 0.0);
    }
    let raw = q.matmul(&stacked);
    let complement = orthonormalize(&(0..m).map(|j| raw.column(j)).collect::<Vec<_>>(), 1e-12);
    if complement.len() != m {
        return Err(Error::InternalInconsistency("complementary subspace lost rank".into()));
    }
    let id = Matrix::identity(n);
    let invariance_residual = (&id - &projector).matmul(t).matmul(&projector).frobenius_norm();
    Ok(InvariantSplit {
        selected: SubspaceBasis::new(n, selected),
        complement: SubspaceBasis::new(n, complement),
        projector,
        gap,
        invariance_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{inverse, subspace_distance};
    use crate::linalg::matrix::ONE;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn unimodular(z: C64) -> bool {
        (z.norm() - 1.0).abs() < 1e-6
    }

    fn e(n: usize, i: usize) -> Vec<C64> {
        let mut v = vec![ZERO; n];
        v[i] = ONE;
        v
    }

    fn rotation_plus_contraction() -> Matrix {
        let th = TAU / 5.0;
        Matrix::from_real_rows(&[
            vec![th.cos(), -th.sin(), 0.0],
            vec![th.sin(), th.cos(), 0.0],
            vec![0.0, 0.0, 0.3],
        ])
    }

    #[test]
    fn diagonal_split() {
        let t = OperatorMatrix::with_default_tol(Matrix::diag(&[C64::new(0.5, 0.0), ONE])).unwrap();
        let s = invariant_split(&t, unimodular).unwrap();
        assert!(subspace_distance(&s.selected.vectors, &[e(2, 1)]) < 1e-14);
        assert!(subspace_distance(&s.complement.vectors, &[e(2, 0)]) < 1e-14);
        assert!(s.projector.dist(&Matrix::diag(&[ZERO, ONE])) < 1e-14);
    }

    #[test]
    fn rotation_block_split() {
        let t = OperatorMatrix::with_default_tol(rotation_plus_contraction()).unwrap();
        let s = invariant_split(&t, unimodular).unwrap();
        assert_eq!(s.selected.dim(), 2);
        assert!(subspace_distance(&s.selected.vectors, &[e(3, 0), e(3, 1)]) < 1e-13);
        assert!(subspace_distance(&s.complement.vectors, &[e(3, 2)]) < 1e-13);
        assert!(s.invariance_residual < 1e-13);
    }

    #[test]
    fn conjugated_split_follows_similarity() {
        // oracle: the split of S A S⁻¹ is S applied to the split of A
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = rotation_plus_contraction();
        let sim = Matrix::from_fn(3, 3, |i, j| {
            let base = if i == j { 1.0 } else { 0.0 };
            C64::new(base + 0.4 * rng.gen_range(-1.0..1.0), 0.4 * rng.gen_range(-1.0..1.0))
        });
        let sinv = inverse(&sim).unwrap();
        let t = OperatorMatrix::with_default_tol(sim.matmul(&a).matmul(&sinv)).unwrap();
        let s = invariant_split(&t, unimodular).unwrap();
        let expect_sel = orthonormalize(&[sim.column(0), sim.column(1)], 1e-12);
        let expect_cmp = orthonormalize(&[sim.column(2)], 1e-12);
        assert!(subspace_distance(&s.selected.vectors, &expect_sel) < 1e-10);
        assert!(subspace_distance(&s.complement.vectors, &expect_cmp) < 1e-10);
        let expected_p = sim.matmul(&Matrix::diag(&[ONE, ONE, ZERO])).matmul(&sinv);
        assert!(s.projector.dist(&expected_p) < 1e-10);
        assert!(s.invariance_residual < 1e-10);
    }

    #[test]
    fn close_groups_rejected() {
        let t = OperatorMatrix::with_default_tol(Matrix::diag(&[ONE, C64::new(0.9999, 0.0)])).unwrap();
        let err = invariant_split(&t, |z| z.re > 0.99995).unwrap_err();
        assert!(matches!(err, Error::IllConditionedSplit { .. }));
    }

    #[test]
    fn trivial_selections() {
        let t = OperatorMatrix::with_default_tol(Matrix::identity(3)).unwrap();
        let all = invariant_split(&t, |_| true).unwrap();
        assert_eq!(all.selected.dim(), 3);
        assert!(all.projector.dist(&Matrix::identity(3)) < 1e-15);
        let none = invariant_split(&t, |_| false).unwrap();
        assert_eq!(none.selected.dim(), 0);
        assert!(none.projector.frobenius_norm() < 1e-15);
    }
}
