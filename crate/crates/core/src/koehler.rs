//! Approximation of the power-orbit closure `K(T)` of a power-bounded matrix
//! and certified idempotents inside it.
//!
//! In finite dimension the closure has a unique minimal idempotent: the
//! projection onto the span of the unimodular eigenvectors along the
//! remaining generalized eigenspaces. Two independent constructions are
//! provided and are expected to agree:
//!
//! * [`minimal_idempotent_spectral`] reads it off a reordered Schur form;
//! * [`minimal_idempotent_dynamical`] finds a power `Tⁿ` that is nearly
//!   idempotent and purifies it with `Q ← 3Q² − 2Q³`, never touching
//!   eigenvalues.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jdlg::projection_bases;
use crate::linalg::eigen::spectrally_power_bounded;
use crate::linalg::{eigen_decompose, inverse, invariant_split, Matrix, OperatorMatrix};
use crate::parallel::Execution;
use crate::report::CheckBlock;

/// Default cap on the number of orbit representatives.
pub const DEFAULT_NET_CAP: usize = 4096;

/// Refinement starts only when `‖Q² − Q‖_F` of the chosen power is below this.
pub const PURIFICATION_BASIN: f64 = 0.1;

const PURIFICATION_MAX_STEPS: usize = 100;

/// Slack (relative to `1 + ‖·‖_F`) under which two objective values tie.
const TIE_SLACK: f64 = 1e-12;

/// A `‖T^m P − P‖_F` at most this counts as a return.
pub const RETURN_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Serialize)]
pub struct Representative {
    #[serde(skip)]
    pub matrix: Matrix,
    /// Smallest `n` with `Tⁿ` assigned to this representative.
    pub first_index: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductClosure {
    pub pairs_checked: usize,
    /// Largest distance from a product of two representatives to the net.
    pub max_distance: f64,
    pub holds: bool,
}

/// ε-net of `{Tⁿ : 1 ≤ n ≤ N}`.
#[derive(Debug, Clone, Serialize)]
pub struct SemigroupApprox {
    #[serde(skip)]
    pub base: OperatorMatrix,
    pub horizon: usize,
    pub epsilon: f64,
    pub representatives: Vec<Representative>,
    /// `index_of[n - 1]` is the representative of `Tⁿ`.
    pub index_of: Vec<usize>,
    pub product_closure: ProductClosure,
}

fn require_power_bounded(op: &OperatorMatrix) -> Result<()> {
    let eig = eigen_decompose(op)?;
    if spectrally_power_bounded(op, &eig) {
        Ok(())
    } else {
        Err(Error::NotPowerBounded { spectral_radius: eig.spectrum.spectral_radius })
    }
}

pub fn orbit_closure(op: &OperatorMatrix, horizon: usize, epsilon: f64) -> Result<SemigroupApprox> {
    orbit_closure_with(op, horizon, epsilon, DEFAULT_NET_CAP, Execution::default())
}

/// Greedy net: `Tⁿ` joins the nearest representative within `epsilon`,
/// otherwise it becomes a new one. Representatives end up pairwise at least
/// `epsilon` apart.
pub fn orbit_closure_with(
    op: &OperatorMatrix,
    horizon: usize,
    epsilon: f64,
    cap: usize,
    exec: Execution,
) -> Result<SemigroupApprox> {
    if horizon == 0 || !(epsilon > 0.0) {
        return Err(Error::InvalidInput("horizon must be positive and epsilon > 0".into()));
    }
    require_power_bounded(op)?;
    let t = op.matrix();
    let mut reps: Vec<Representative> = Vec::new();
    let mut index_of = Vec::with_capacity(horizon);
    let mut power = t.clone();
    for n in 1..=horizon {
        if n > 1 {
            power = power.matmul(t);
        }
        let nearest = reps
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.matrix.dist(&power)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match nearest {
            Some((i, d)) if d < epsilon => index_of.push(i),
            _ => {
                if reps.len() >= cap {
                    return Err(Error::NetTooLarge { cap });
                }
                index_of.push(reps.len());
                reps.push(Representative { matrix: power.clone(), first_index: n });
            }
        }
    }
    let rows = exec.map_range(reps.len(), |i| {
        let mut checked = 0usize;
        let mut worst: f64 = 0.0;
        for rj in &reps {
            if reps[i].first_index + rj.first_index > horizon {
                continue;
            }
            let prod = reps[i].matrix.matmul(&rj.matrix);
            let d = reps.iter().map(|r| r.matrix.dist(&prod)).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
            checked += 1;
        }
        (checked, worst)
    });
    let pairs_checked = rows.iter().map(|r| r.0).sum();
    let max_distance = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(SemigroupApprox {
        base: op.clone(),
        horizon,
        epsilon,
        representatives: reps,
        index_of,
        product_closure: ProductClosure { pairs_checked, max_distance, holds: max_distance <= 3.0 * epsilon },
    })
}

/// How membership of `P` in the orbit closure is witnessed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MembershipWitness {
    Spectral,
    /// Indices `n, 2n, 4n, …` with `‖T^{index} − P‖_F`.
    Powers { indices: Vec<u64>, distances: Vec<f64> },
    /// Supplied from outside and only certified.
    External,
}

/// A certified idempotent commuting with `T`.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionMatrix {
    #[serde(skip)]
    pub p: Matrix,
    pub idempotency_residual: f64,
    pub commutation_residual: f64,
    pub witness: MembershipWitness,
    /// `‖Q² − Q‖_F` along the purification, if any.
    pub purification: Vec<f64>,
}

impl ProjectionMatrix {
    pub fn idempotency_bound(&self) -> f64 {
        1e-8 * (1.0 + self.p.frobenius_norm())
    }

    pub fn commutation_bound(&self, t: &Matrix) -> f64 {
        1e-8 * (1.0 + self.p.frobenius_norm() * t.frobenius_norm())
    }

    /// Compute the residual certificates and reject matrices violating them.
    pub fn certify(op: &OperatorMatrix, p: Matrix, witness: MembershipWitness) -> Result<Self> {
        let t = op.matrix();
        if p.rows() != op.dim() || !p.is_square() {
            return Err(Error::InvalidInput("projection dimension mismatch".into()));
        }
        let cert = Self {
            idempotency_residual: p.matmul(&p).dist(&p),
            commutation_residual: p.commutator_norm(t),
            p,
            witness,
            purification: Vec::new(),
        };
        if cert.idempotency_residual > cert.idempotency_bound() {
            return Err(Error::InternalInconsistency(format!(
                "idempotency residual {:.3e} exceeds certificate bound",
                cert.idempotency_residual
            )));
        }
        if cert.commutation_residual > cert.commutation_bound(t) {
            return Err(Error::InternalInconsistency(format!(
                "commutation residual {:.3e} exceeds certificate bound",
                cert.commutation_residual
            )));
        }
        Ok(cert)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.p
    }
}

/// Projection onto the unimodular eigenspaces along the complementary
/// invariant subspace.
pub fn minimal_idempotent_spectral(op: &OperatorMatrix) -> Result<ProjectionMatrix> {
    require_power_bounded(op)?;
    let tol = op.tol();
    let split = invariant_split(op, |z| z.norm() >= 1.0 - tol)?;
    ProjectionMatrix::certify(op, split.projector, MembershipWitness::Spectral)
}

/// Near-return objective `‖T^{2n} − Tⁿ‖_F` for `n = 1..=horizon`.
pub fn near_idempotent_objective(op: &OperatorMatrix, horizon: usize, exec: Execution) -> Vec<f64> {
    let t = op.matrix();
    let mut powers = Vec::with_capacity(horizon);
    let mut power = t.clone();
    for n in 1..=horizon {
        if n > 1 {
            power = power.matmul(t);
        }
        powers.push(power.clone());
    }
    exec.map_slice(&powers, |q| q.matmul(q).dist(q))
}

/// Smallest index (1-based) whose value ties with the minimum.
fn first_near_minimum(values: &[f64], scale: impl Fn(usize) -> f64) -> Option<(usize, f64)> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return None;
    }
    values
        .iter()
        .enumerate()
        .find(|(i, v)| **v <= min + TIE_SLACK * scale(*i))
        .map(|(i, v)| (i + 1, *v))
}

pub fn minimal_idempotent_dynamical(op: &OperatorMatrix, horizon: usize) -> Result<ProjectionMatrix> {
    minimal_idempotent_dynamical_with(op, horizon, Execution::default())
}

pub fn minimal_idempotent_dynamical_with(
    op: &OperatorMatrix,
    horizon: usize,
    exec: Execution,
) -> Result<ProjectionMatrix> {
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon must be positive".into()));
    }
    require_power_bounded(op)?;
    let t = op.matrix();
    let objective = near_idempotent_objective(op, horizon, exec);
    let (n, best) = first_near_minimum(&objective, |_| 1.0 + t.frobenius_norm())
        .ok_or_else(|| Error::InternalInconsistency("non-finite near-return objective".into()))?;
    if best >= PURIFICATION_BASIN {
        return Err(Error::HorizonTooSmall {
            horizon,
            detail: format!("best ‖T^2n − T^n‖_F = {best:.3e} at n = {n}, refinement basin is {PURIFICATION_BASIN}"),
        });
    }
    let start = t.pow(n as u64);
    let (p, history) = purify(&start)?;
    let mut indices = Vec::new();
    let mut distances = Vec::new();
    let mut q = start;
    let mut idx = n as u64;
    for _ in 0..4 {
        indices.push(idx);
        distances.push(q.dist(&p));
        q = q.matmul(&q);
        idx *= 2;
    }
    let mut cert = ProjectionMatrix::certify(op, p, MembershipWitness::Powers { indices, distances })?;
    cert.purification = history;
    Ok(cert)
}

/// Iterate `Q ← 3Q² − 2Q³` until `Q² = Q` exactly or the residual stops
/// decreasing; fails if it ends above `1e-8 (1 + ‖Q‖_F)`. Returns the final
/// matrix and residual history.
pub fn purify(start: &Matrix) -> Result<(Matrix, Vec<f64>)> {
    let n = start.rows();
    let three = Matrix::identity(n).scale(3.0.into());
    let mut q = start.clone();
    let mut q2 = q.matmul(&q);
    let mut r = q2.dist(&q);
    let mut history = vec![r];
    for _ in 0..PURIFICATION_MAX_STEPS {
        if r == 0.0 {
            break;
        }
        let next = q2.matmul(&(&three - &q.scale(2.0.into())));
        let next2 = next.matmul(&next);
        let rn = next2.dist(&next);
        if !(rn < r) {
            break;
        }
        q = next;
        q2 = next2;
        r = rn;
        history.push(r);
    }
    if r > 1e-8 * (1.0 + q.frobenius_norm()) {
        return Err(Error::InternalInconsistency(format!("purification stalled at residual {r:.3e}")));
    }
    Ok((q, history))
}

/// `J` with `TJ = JT = P` and `JP = PJ = J`, the inverse of `T` on `im P`.
#[derive(Debug, Clone, Serialize)]
pub struct InverseOnRev {
    #[serde(skip)]
    pub j: Matrix,
    /// `m` with `T^m P ≈ P`; `J = T^{m−1} P`.
    pub return_index: usize,
    pub return_residual: f64,
    /// `‖J − B T_rev⁻¹ Bᴴ P‖_F` against direct inversion in an image basis.
    pub direct_discrepancy: f64,
}

pub fn inverse_on_rev(op: &OperatorMatrix, proj: &ProjectionMatrix, horizon: usize) -> Result<InverseOnRev> {
    require_power_bounded(op)?;
    let t = op.matrix();
    let p = &proj.p;
    let mut m_pow = p.clone();
    let mut errors = Vec::with_capacity(horizon);
    for _ in 1..=horizon {
        m_pow = t.matmul(&m_pow);
        errors.push(m_pow.dist(p));
    }
    let pnorm = p.frobenius_norm();
    let (m, residual) = first_near_minimum(&errors, |_| 1.0 + pnorm)
        .ok_or_else(|| Error::InternalInconsistency("non-finite return residual".into()))?;
    if residual > RETURN_TOL {
        return Err(Error::HorizonTooSmall {
            horizon,
            detail: format!("no m with ‖T^m P − P‖_F ≤ {RETURN_TOL:.0e}; best {residual:.3e} at m = {m}"),
        });
    }
    let j = t.pow(m as u64 - 1).matmul(p);

    let (rev, _) = projection_bases(p, op.tol())?;
    let direct = if rev.is_empty() {
        Matrix::zeros(op.dim(), op.dim())
    } else {
        let b = Matrix::from_columns(op.dim(), &rev);
        let t_rev = b.adjoint().matmul(t).matmul(&b);
        let t_rev_inv = inverse(&t_rev).map_err(|_| {
            Error::InternalInconsistency("restriction of T to im P is singular".into())
        })?;
        b.matmul(&t_rev_inv).matmul(&b.adjoint()).matmul(p)
    };
    let direct_discrepancy = j.dist(&direct);
    if direct_discrepancy > 1e-6 * (1.0 + j.frobenius_norm()) {
        return Err(Error::InternalInconsistency(format!(
            "near-return inverse differs from direct inverse by {direct_discrepancy:.3e}"
        )));
    }
    Ok(InverseOnRev { j, return_index: m, return_residual: residual, direct_discrepancy })
}

/// `‖RT − TR‖_F` for every representative, judged against `3ε‖T‖_F`.
pub fn commutation_report(approx: &SemigroupApprox) -> CheckBlock {
    let t = approx.base.matrix();
    let residuals: Vec<f64> = approx.representatives.iter().map(|r| r.matrix.commutator_norm(t)).collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    CheckBlock::new("closure.commutation")
        .residual("max_commutator", worst, 3.0 * approx.epsilon * t.frobenius_norm())
        .certificates(serde_json::json!({ "per_representative": residuals }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{C64, ONE, ZERO};
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn op(m: Matrix) -> OperatorMatrix {
        OperatorMatrix::with_default_tol(m).unwrap()
    }

    fn rotation(theta: f64) -> Matrix {
        Matrix::from_real_rows(&[vec![theta.cos(), -theta.sin()], vec![theta.sin(), theta.cos()]])
    }

    fn nilpotent3() -> Matrix {
        Matrix::from_real_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]])
    }

    #[test]
    fn nilpotent_net() {
        let t = nilpotent3();
        let s = orbit_closure(&op(t.clone()), 10, 1e-6).unwrap();
        assert_eq!(s.representatives.len(), 3);
        assert!(s.representatives[0].matrix.dist(&t) == 0.0);
        assert!(s.representatives[1].matrix.dist(&t.pow(2)) == 0.0);
        assert_eq!(s.representatives[2].matrix.frobenius_norm(), 0.0);
        assert_eq!(s.index_of, vec![0, 1, 2, 2, 2, 2, 2, 2, 2, 2]);
        assert!(s.product_closure.holds);
    }

    #[test]
    fn idempotent_net() {
        let s = orbit_closure(&op(Matrix::diag(&[ONE, ZERO])), 20, 1e-6).unwrap();
        assert_eq!(s.representatives.len(), 1);
    }

    #[test]
    fn rotation_net_is_cyclic_group() {
        // oracle: the five rotation matrices by 2πk/5 computed directly
        let s = orbit_closure(&op(rotation(TAU / 5.0)), 50, 1e-6).unwrap();
        assert_eq!(s.representatives.len(), 5);
        for (k, r) in s.representatives.iter().enumerate() {
            assert!(r.matrix.dist(&rotation(TAU * (k + 1) as f64 / 5.0)) < 1e-12);
        }
        for n in 1..=50 {
            assert_eq!(s.index_of[n - 1], (n - 1) % 5);
        }
        assert!(s.product_closure.holds);
        assert!(s.product_closure.pairs_checked > 0);
    }

    #[test]
    fn net_cap_and_power_bound_errors() {
        let err = orbit_closure_with(&op(rotation(1.0)), 100, 1e-9, 10, Execution::Sequential).unwrap_err();
        assert_eq!(err, Error::NetTooLarge { cap: 10 });
        let jordan = Matrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]);
        assert!(matches!(orbit_closure(&op(jordan), 10, 1e-6), Err(Error::NotPowerBounded { .. })));
    }

    #[test]
    fn spectral_idempotent_examples() {
        let p = minimal_idempotent_spectral(&op(Matrix::identity(3))).unwrap();
        assert!(p.p.dist(&Matrix::identity(3)) < 1e-14);
        assert_eq!(p.witness, MembershipWitness::Spectral);
        let w = C64::from_polar(1.0, TAU / 3.0);
        let p = minimal_idempotent_spectral(&op(Matrix::diag(&[C64::new(0.5, 0.0), w]))).unwrap();
        assert!(p.p.dist(&Matrix::diag(&[ZERO, ONE])) < 1e-14);
    }

    #[test]
    fn dynamical_idempotent_examples() {
        let p = minimal_idempotent_dynamical(&op(Matrix::diag(&[ONE, C64::new(0.5, 0.0)])), 64).unwrap();
        assert!(p.p.dist(&Matrix::diag(&[ONE, ZERO])) < 1e-12);
        let MembershipWitness::Powers { indices, distances } = &p.witness else { panic!() };
        assert!(indices[0] >= 20 && indices[0] <= 64);
        assert!(distances.windows(2).all(|w| w[1] <= w[0]));

        let p = minimal_idempotent_dynamical(&op(rotation(TAU / 5.0)), 50).unwrap();
        assert!(p.p.dist(&Matrix::identity(2)) < 1e-12);
        let MembershipWitness::Powers { indices, .. } = &p.witness else { panic!() };
        assert_eq!(indices[0], 5);

        let p = minimal_idempotent_dynamical(&op(nilpotent3()), 10).unwrap();
        assert_eq!(p.p.frobenius_norm(), 0.0);
    }

    #[test]
    fn dynamical_horizon_too_small() {
        let err = minimal_idempotent_dynamical(&op(rotation(TAU / 7.0)), 3).unwrap_err();
        assert!(matches!(err, Error::HorizonTooSmall { .. }));
    }

    #[test]
    fn purification_is_monotone() {
        let q = Matrix::from_real_rows(&[vec![1.02, 0.03], vec![-0.01, 0.04]]);
        let (p, hist) = purify(&q).unwrap();
        assert!(hist.windows(2).all(|w| w[1] < w[0]));
        assert!(p.matmul(&p).dist(&p) < 1e-12);
    }

    #[test]
    fn inverse_examples() {
        let t = op(rotation(TAU / 5.0));
        let p = minimal_idempotent_spectral(&t).unwrap();
        let inv = inverse_on_rev(&t, &p, 50).unwrap();
        assert_eq!(inv.return_index, 5);
        assert!(inv.j.dist(&rotation(-TAU / 5.0)) < 1e-12);

        let t = op(Matrix::identity(2));
        let p = minimal_idempotent_spectral(&t).unwrap();
        let inv = inverse_on_rev(&t, &p, 10).unwrap();
        assert!(inv.j.dist(&Matrix::identity(2)) < 1e-15);

        let t = op(Matrix::diag(&[C64::from_polar(1.0, FRAC_PI_2), C64::new(0.3, 0.0)]));
        let p = minimal_idempotent_spectral(&t).unwrap();
        let inv = inverse_on_rev(&t, &p, 10).unwrap();
        assert!(inv.j.dist(&Matrix::diag(&[C64::from_polar(1.0, -FRAC_PI_2), ZERO])) < 1e-12);
        let tm = t.matrix();
        assert!(tm.matmul(&inv.j).dist(&p.p) < 1e-6);
        assert!(inv.j.matmul(tm).dist(&p.p) < 1e-6);
        assert!(inv.j.matmul(&p.p).dist(&inv.j) < 1e-8);
    }

    #[test]
    fn commutation_examples() {
        let s = orbit_closure(&op(rotation(TAU / 5.0)), 20, 1e-6).unwrap();
        let b = commutation_report(&s);
        assert!(b.passed());
        assert!(b.residuals["max_commutator"] < 1e-14);
        let s = orbit_closure(&op(Matrix::diag(&[C64::new(0.7, 0.0), C64::new(0.0, 1.0)])), 30, 1e-6).unwrap();
        assert_eq!(commutation_report(&s).residuals["max_commutator"], 0.0);
    }
}
