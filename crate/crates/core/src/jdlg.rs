//! The splitting `ℂⁿ = E_rev ⊕ E_aws` into image and kernel of an idempotent
//! from the orbit closure, and checks of its defining properties.
//!
//! Where finite dimension forces it, "accumulation point" statements are
//! checked in their strengthened form: vectors of `E_aws` are required to
//! converge to zero, and vectors of `E_rev` to return within `epsilon`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::ip::return_time_set;
use crate::koehler::{ProjectionMatrix, SemigroupApprox};
use crate::linalg::matrix::{norm, sub_vec, ZERO};
use crate::linalg::{eigen_decompose, inverse, subspace_distance, svd, Matrix, OperatorMatrix, SubspaceBasis, C64};
use crate::report::CheckBlock;

/// Stability threshold for `‖Tⁿw‖`.
pub const DECAY_TOL: f64 = 1e-6;

/// Orthonormal bases of `im P` and `ker P`.
///
/// The rank is cut at the largest ratio between consecutive singular values,
/// with a virtual leading value 1 (nonzero singular values of a projection
/// are at least 1) and a floor at roundoff level. A cut whose retained value
/// drops below `1 − 10·tol`, or whose discarded value exceeds
/// `10·tol·max(1, σ₁)`, is ambiguous.
pub fn projection_bases(p: &Matrix, tol: f64) -> Result<(Vec<Vec<C64>>, Vec<Vec<C64>>)> {
    let n = p.rows();
    let d = svd(p);
    let top = d.sigma.first().copied().unwrap_or(0.0).max(1.0);
    let floor = f64::EPSILON * top * n as f64;
    let mut aug = Vec::with_capacity(n + 2);
    aug.push(1.0);
    aug.extend(d.sigma.iter().map(|&s| s.max(floor)));
    aug.push(floor);
    let rank = (0..=n)
        .map(|k| (k, aug[k] / aug[k + 1]))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0;
    if rank > 0 && d.sigma[rank - 1] < 1.0 - 10.0 * tol {
        return Err(Error::IllConditionedProjection { value: d.sigma[rank - 1] });
    }
    if rank < n && d.sigma[rank] > 10.0 * tol * top {
        return Err(Error::IllConditionedProjection { value: d.sigma[rank] });
    }
    let image = (0..rank).map(|k| d.u.column(k)).collect();
    let kernel = (rank..n).map(|k| d.v.column(k)).collect();
    Ok((image, kernel))
}

#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub projection: ProjectionMatrix,
    pub rev_basis: SubspaceBasis,
    pub aws_basis: SubspaceBasis,
    /// `T` restricted to `E_rev` in `rev_basis`.
    #[serde(skip)]
    pub t_rev: Matrix,
    #[serde(skip)]
    pub t_rev_inverse: Matrix,
    /// `‖T_rev T_rev⁻¹ − I‖_F`.
    pub inverse_residual: f64,
}

impl Decomposition {
    pub fn rev_dim(&self) -> usize {
        self.rev_basis.dim()
    }

    pub fn aws_dim(&self) -> usize {
        self.aws_basis.dim()
    }

    pub fn p(&self) -> &Matrix {
        &self.projection.p
    }
}

pub fn decompose(op: &OperatorMatrix, proj: &ProjectionMatrix) -> Result<Decomposition> {
    let n = op.dim();
    let tol = op.tol();
    let p = &proj.p;
    let (image, kernel) = projection_bases(p, tol)?;
    for v in &image {
        let r = norm(&sub_vec(&p.mul_vec(v), v));
        if r > tol * (1.0 + p.frobenius_norm()) {
            return Err(Error::InternalInconsistency(format!("P does not fix its image: residual {r:.3e}")));
        }
    }
    for w in &kernel {
        let r = norm(&p.mul_vec(w));
        if r > tol * (1.0 + p.frobenius_norm()) {
            return Err(Error::InternalInconsistency(format!("P does not annihilate its kernel: residual {r:.3e}")));
        }
    }
    let k = image.len();
    let (t_rev, t_rev_inverse, inverse_residual) = if k == 0 {
        (Matrix::zeros(0, 0), Matrix::zeros(0, 0), 0.0)
    } else {
        let b = Matrix::from_columns(n, &image);
        let t_rev = b.adjoint().matmul(op.matrix()).matmul(&b);
        let inv = inverse(&t_rev)
            .map_err(|_| Error::InternalInconsistency("T restricted to im P is singular".into()))?;
        let res = t_rev.matmul(&inv).dist(&Matrix::identity(k));
        (t_rev, inv, res)
    };
    if inverse_residual > 1e-8 {
        return Err(Error::InternalInconsistency(format!("‖T_rev T_rev⁻¹ − I‖ = {inverse_residual:.3e}")));
    }
    Ok(Decomposition {
        projection: proj.clone(),
        rev_basis: SubspaceBasis::new(n, image),
        aws_basis: SubspaceBasis::new(n, kernel),
        t_rev,
        t_rev_inverse,
        inverse_residual,
    })
}

/// Largest principal-angle sine between the reversible parts and between the
/// stable parts of two decompositions.
pub fn decomposition_distance(a: &Decomposition, b: &Decomposition) -> f64 {
    subspace_distance(&a.rev_basis.vectors, &b.rev_basis.vectors)
        .max(subspace_distance(&a.aws_basis.vectors, &b.aws_basis.vectors))
}

fn invariance_residuals(p: &Matrix, r: &Matrix) -> (f64, f64) {
    let id = Matrix::identity(p.rows());
    let comp = &id - p;
    (comp.matmul(r).matmul(p).frobenius_norm(), p.matmul(r).matmul(&comp).frobenius_norm())
}

/// Both parts are invariant under `T` and under every orbit representative.
pub fn verify_invariance(d: &Decomposition, op: &OperatorMatrix, closure: Option<&SemigroupApprox>) -> CheckBlock {
    let t = op.matrix();
    let tn = t.frobenius_norm();
    let (rev, aws) = invariance_residuals(d.p(), t);
    let mut block = CheckBlock::new("decomposition.invariance")
        .residual("rev_under_T", rev, 1e-8 * tn)
        .residual("aws_under_T", aws, 1e-8 * tn);
    if let Some(s) = closure {
        let worst = s
            .representatives
            .iter()
            .map(|r| {
                let (a, b) = invariance_residuals(d.p(), &r.matrix);
                a.max(b) / r.matrix.frobenius_norm().max(1.0)
            })
            .fold(0.0, f64::max);
        block = block.residual("under_closure_relative", worst, 1e-8);
    }
    block
}

/// Every eigenvector for an eigenvalue with `|λ| ≥ 1 − tol` lies in `E_rev`.
pub fn verify_unimodular_eigenvectors(d: &Decomposition, op: &OperatorMatrix) -> Result<CheckBlock> {
    let eig = eigen_decompose(op)?;
    let p = d.p();
    let mut worst: f64 = 0.0;
    let mut count = 0usize;
    for space in eig.eigenspaces.iter().filter(|s| s.value.norm() >= 1.0 - op.tol()) {
        for v in &space.vectors {
            worst = worst.max(norm(&sub_vec(&p.mul_vec(v), v)) / norm(v));
            count += 1;
        }
    }
    Ok(CheckBlock::new("decomposition.unimodular_eigenvectors")
        .residual("max_relative_offset", worst, 1e-6)
        .certificates(json!({ "eigenvectors_checked": count })))
}

/// `Tⁿw → 0` for a basis of `E_aws` within the horizon, and sampled vectors
/// whose orbit decays have `Px ≈ 0`.
pub fn verify_stability(d: &Decomposition, op: &OperatorMatrix, horizon: usize, seed: u64) -> Result<CheckBlock> {
    let t = op.matrix();
    let n = op.dim();
    let mut settle = Vec::with_capacity(d.aws_dim());
    for w in &d.aws_basis.vectors {
        let mut x = w.clone();
        let mut last_above = 0usize;
        for step in 1..=horizon {
            x = t.mul_vec(&x);
            if norm(&x) > DECAY_TOL {
                last_above = step;
            }
        }
        if last_above == horizon {
            return Err(Error::HorizonTooSmall {
                horizon,
                detail: format!("‖T^N w‖ = {:.3e} still above {DECAY_TOL:.0e}", norm(&x)),
            });
        }
        settle.push(last_above + 1);
    }
    let n0 = settle.iter().copied().max().unwrap_or(0);

    // converse direction on sampled vectors
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let aws = d.aws_basis.as_matrix();
    let p = d.p();
    let mut decayed = 0usize;
    let mut worst_px: f64 = 0.0;
    for i in 0..16 {
        let x: Vec<C64> = if i % 2 == 0 && d.aws_dim() > 0 {
            let c: Vec<C64> = (0..d.aws_dim()).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            aws.mul_vec(&c)
        } else {
            (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
        };
        let xn = norm(&x);
        if xn == 0.0 {
            continue;
        }
        let mut y = x.clone();
        for _ in 0..horizon {
            y = t.mul_vec(&y);
        }
        if norm(&y) <= DECAY_TOL * xn {
            decayed += 1;
            worst_px = worst_px.max(norm(&p.mul_vec(&x)) / xn);
        }
    }
    let mut block = CheckBlock::new("decomposition.stability")
        .residual("settling_index", n0 as f64, horizon as f64)
        .residual("decayed_sample_rev_component", worst_px, 1e-6)
        .certificates(json!({ "settling_per_basis_vector": settle, "decayed_samples": decayed }))
        .note("checked in strengthened form: T^n w -> 0 on E_aws");
    if d.aws_dim() == 0 {
        block = block.note("E_aws = {0}; basis condition vacuous");
    }
    Ok(block)
}

/// Every `E_rev` basis vector returns within `epsilon` of itself.
pub fn verify_rev_recurrence(d: &Decomposition, op: &OperatorMatrix, epsilon: f64, horizon: usize) -> Result<CheckBlock> {
    let mut certs = Vec::new();
    for (i, x) in d.rev_basis.vectors.iter().enumerate() {
        let returns = return_time_set(op, x, epsilon, horizon);
        if returns.is_empty() {
            let angles: Vec<f64> = eigen_decompose(op)?
                .spectrum
                .eigenvalues
                .iter()
                .filter(|e| e.value.norm() >= 1.0 - op.tol())
                .map(|e| e.value.im.atan2(e.value.re) / std::f64::consts::TAU)
                .collect();
            return Err(Error::HorizonTooSmall {
                horizon,
                detail: format!("rev basis vector {i} never returned within {epsilon:.1e}; unimodular angles / 2π = {angles:?}"),
            });
        }
        let mut max_gap = returns[0];
        for w in returns.windows(2) {
            max_gap = max_gap.max(w[1] - w[0]);
        }
        certs.push(json!({ "first_return": returns[0], "max_gap": max_gap, "returns": returns.len() }));
    }
    Ok(CheckBlock::new("decomposition.rev_recurrence")
        .condition("all_rev_vectors_return", true)
        .certificates(json!({ "per_basis_vector": certs }))
        .note("checked in strengthened form: return within epsilon inside the horizon"))
}

/// Identity on `E_rev`, zero on `E_aws`, and `‖T_rev⁻¹‖₂` bounded by the
/// power bound (its inverse is a limit of powers).
pub fn verify_structure(d: &Decomposition, power_bound: f64) -> CheckBlock {
    let p = d.p();
    let on_rev = d.rev_basis.vectors.iter().map(|v| norm(&sub_vec(&p.mul_vec(v), v))).fold(0.0, f64::max);
    let on_aws = d.aws_basis.vectors.iter().map(|w| norm(&p.mul_vec(w))).fold(0.0, f64::max);
    let inv_norm = if d.rev_dim() == 0 { 0.0 } else { crate::linalg::norm2(&d.t_rev_inverse) };
    CheckBlock::new("decomposition.structure")
        .residual("p_minus_identity_on_rev", on_rev, 1e-9 * (1.0 + p.frobenius_norm()))
        .residual("p_on_aws", on_aws, 1e-9 * (1.0 + p.frobenius_norm()))
        .residual("inverse_residual", d.inverse_residual, 1e-8)
        .residual("rev_inverse_norm", inv_norm, power_bound * (1.0 + 1e-8))
        .condition("dimensions_add_up", d.rev_dim() + d.aws_dim() == d.rev_basis.dim_ambient)
}

/// Zero vector helper for callers assembling samples.
pub fn zero_vector(n: usize) -> Vec<C64> {
    vec![ZERO; n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::koehler::{minimal_idempotent_dynamical, minimal_idempotent_spectral, MembershipWitness};
    use crate::linalg::matrix::ONE;
    use std::f64::consts::TAU;

    fn op(m: Matrix) -> OperatorMatrix {
        OperatorMatrix::with_default_tol(m).unwrap()
    }

    fn certify(t: &OperatorMatrix, p: Matrix) -> ProjectionMatrix {
        ProjectionMatrix::certify(t, p, MembershipWitness::External).unwrap()
    }

    #[test]
    fn identity_is_all_reversible() {
        let t = op(Matrix::identity(3));
        let d = decompose(&t, &certify(&t, Matrix::identity(3))).unwrap();
        assert_eq!((d.rev_dim(), d.aws_dim()), (3, 0));
        assert!(verify_invariance(&d, &t, None).passed());
        let r = verify_rev_recurrence(&d, &t, 1e-6, 10).unwrap();
        assert!(r.passed());
        assert_eq!(r.certificates["per_basis_vector"][0]["first_return"], 1);
        assert_eq!(r.certificates["per_basis_vector"][0]["max_gap"], 1);
    }

    #[test]
    fn nilpotent_is_all_stable() {
        let m = Matrix::from_real_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]]);
        let t = op(m);
        let d = decompose(&t, &certify(&t, Matrix::zeros(3, 3))).unwrap();
        assert_eq!((d.rev_dim(), d.aws_dim()), (0, 3));
        let s = verify_stability(&d, &t, 10, 1).unwrap();
        assert!(s.passed());
        // every vector is annihilated by T³
        assert!(s.residuals["settling_index"] <= 4.0);
    }

    #[test]
    fn diagonal_split_and_restriction() {
        let th = 0.7;
        let t = op(Matrix::diag(&[C64::from_polar(1.0, th), C64::new(0.5, 0.0)]));
        let d = decompose(&t, &certify(&t, Matrix::diag(&[ONE, ZERO]))).unwrap();
        assert_eq!((d.rev_dim(), d.aws_dim()), (1, 1));
        assert!((d.t_rev[(0, 0)] - C64::from_polar(1.0, th)).norm() < 1e-14);
        assert!(d.rev_basis.vectors[0][1].norm() < 1e-15);
        assert!(d.aws_basis.vectors[0][0].norm() < 1e-15);
    }

    #[test]
    fn ambiguous_rank_rejected() {
        let t = op(Matrix::identity(2));
        let p = Matrix::diag(&[ONE, C64::new(1e-4, 0.0)]);
        assert!(matches!(projection_bases(&p, 1e-9), Err(Error::IllConditionedProjection { .. })));
        let _ = t;
    }

    #[test]
    fn stability_decay_matches_geometric_formula() {
        // oracle: 0.9^n ≤ 1e-6 first holds at n = ceil(ln 1e-6 / ln 0.9) = 132
        let t = op(Matrix::diag(&[C64::new(0.9, 0.0), C64::new(0.5, 0.0)]));
        let d = decompose(&t, &certify(&t, Matrix::zeros(2, 2))).unwrap();
        let s = verify_stability(&d, &t, 200, 3).unwrap();
        let expected = ((1e-6f64).ln() / 0.9f64.ln()).ceil();
        assert_eq!(expected, 132.0);
        assert_eq!(s.residuals["settling_index"], expected);
        assert!(matches!(verify_stability(&d, &t, 100, 3), Err(Error::HorizonTooSmall { .. })));
    }

    #[test]
    fn rev_recurrence_periods() {
        let th = TAU / 5.0;
        let rot = Matrix::from_real_rows(&[vec![th.cos(), -th.sin()], vec![th.sin(), th.cos()]]);
        let t = op(rot);
        let p = minimal_idempotent_spectral(&t).unwrap();
        let d = decompose(&t, &p).unwrap();
        let r = verify_rev_recurrence(&d, &t, 1e-6, 50).unwrap();
        for c in r.certificates["per_basis_vector"].as_array().unwrap() {
            assert_eq!(c["first_return"], 5);
            assert_eq!(c["max_gap"], 5);
            assert_eq!(c["returns"], 10);
        }
        let t7 = op(Matrix::diag(&[C64::from_polar(1.0, TAU * 3.0 / 7.0)]));
        let d7 = decompose(&t7, &certify(&t7, Matrix::identity(1))).unwrap();
        let r7 = verify_rev_recurrence(&d7, &t7, 1e-6, 70).unwrap();
        assert_eq!(r7.certificates["per_basis_vector"][0]["first_return"], 7);
        assert_eq!(r7.certificates["per_basis_vector"][0]["returns"], 10);
        assert!(verify_rev_recurrence(&d7, &t7, 1e-6, 6).is_err());
    }

    #[test]
    fn spectral_and_dynamical_decompositions_coincide() {
        let th = TAU / 5.0;
        let m = Matrix::from_real_rows(&[
            vec![th.cos(), -th.sin(), 0.2],
            vec![th.sin(), th.cos(), 0.1],
            vec![0.0, 0.0, 0.3],
        ]);
        let t = op(m);
        let a = decompose(&t, &minimal_idempotent_spectral(&t).unwrap()).unwrap();
        let b = decompose(&t, &minimal_idempotent_dynamical(&t, 100).unwrap()).unwrap();
        assert!(decomposition_distance(&a, &b) < 1e-6);
        assert!(verify_unimodular_eigenvectors(&a, &t).unwrap().passed());
        assert!(verify_invariance(&a, &t, None).passed());
        assert!(verify_structure(&a, 2.0f64.sqrt() * 2.0).passed());
    }
}
