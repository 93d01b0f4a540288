//! The coordinatewise cone of `ℝⁿ` and lattice operations induced on the
//! image of a positive projection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::koehler::{InverseOnRev, ProjectionMatrix};
use crate::linalg::OperatorMatrix;
use crate::report::CheckBlock;

pub const AXIOM_TOL: f64 = 1e-8;
pub const ISOMORPHISM_TOL: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeOrder {
    pub dim: usize,
    pub tol_pos: f64,
}

impl ConeOrder {
    pub fn new(dim: usize, tol_pos: f64) -> Result<Self> {
        if !(tol_pos > 0.0 && tol_pos <= 1e-4) {
            return Err(Error::InvalidInput(format!("tol_pos must lie in (0, 1e-4], got {tol_pos}")));
        }
        Ok(Self { dim, tol_pos })
    }

    pub fn for_operator(op: &OperatorMatrix) -> Self {
        Self { dim: op.dim(), tol_pos: op.tol().clamp(f64::MIN_POSITIVE, 1e-4) }
    }
}

fn require_positive(op: &OperatorMatrix, order: &ConeOrder) -> Result<()> {
    if !op.is_nonnegative(order.tol_pos) {
        return Err(Error::NotPositive(format!(
            "min entry {:.3e}, max |imag| {:.3e}",
            op.matrix().min_real(),
            op.matrix().max_imag()
        )));
    }
    Ok(())
}

pub fn verify_positive_projection(op: &OperatorMatrix, proj: &ProjectionMatrix, order: &ConeOrder) -> Result<CheckBlock> {
    require_positive(op, order)?;
    let p = proj.matrix();
    Ok(CheckBlock::new("lattice.positive_projection")
        .residual("negative_part", (-p.min_real()).max(0.0), order.tol_pos)
        .residual("max_imag", p.max_imag(), order.tol_pos))
}

/// `sup_P(x, y) = P(x ∨ y)` and `inf_P(x, y) = P(x ∧ y)` on `im P`.
#[derive(Debug, Clone)]
pub struct InducedLattice {
    p: Vec<Vec<f64>>,
}

pub fn induced_lattice_ops(proj: &ProjectionMatrix, order: &ConeOrder) -> Result<InducedLattice> {
    let p = proj.matrix();
    if p.min_real() < -order.tol_pos || p.max_imag() > order.tol_pos {
        return Err(Error::NotPositive(format!("projection has entry {:.3e}", p.min_real())));
    }
    Ok(InducedLattice { p: p.real_part() })
}

impl InducedLattice {
    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.p.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn sup(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.project(&x.iter().zip(y).map(|(a, b)| a.max(*b)).collect::<Vec<_>>())
    }

    pub fn inf(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        self.project(&x.iter().zip(y).map(|(a, b)| a.min(*b)).collect::<Vec<_>>())
    }

    /// Unit-norm element of `im P` (zero if `P = 0`).
    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        let raw: Vec<f64> = (0..self.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = self.project(&raw);
        let n = dist(&v, &vec![0.0; v.len()]);
        if n == 0.0 {
            v
        } else {
            v.iter().map(|a| a / n).collect()
        }
    }

    /// Commutativity, associativity, idempotency and absorption on sampled
    /// triples from `im P`.
    pub fn verify_axioms(&self, samples: usize, seed: u64) -> CheckBlock {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut comm, mut assoc, mut idem, mut absorb) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..samples {
            let x = self.sample(&mut rng);
            let y = self.sample(&mut rng);
            let z = self.sample(&mut rng);
            comm = comm.max(dist(&self.sup(&x, &y), &self.sup(&y, &x))).max(dist(&self.inf(&x, &y), &self.inf(&y, &x)));
            assoc = assoc
                .max(dist(&self.sup(&self.sup(&x, &y), &z), &self.sup(&x, &self.sup(&y, &z))))
                .max(dist(&self.inf(&self.inf(&x, &y), &z), &self.inf(&x, &self.inf(&y, &z))));
            idem = idem.max(dist(&self.sup(&x, &x), &x)).max(dist(&self.inf(&x, &x), &x));
            absorb = absorb
                .max(dist(&self.sup(&x, &self.inf(&x, &y)), &x))
                .max(dist(&self.inf(&x, &self.sup(&x, &y)), &x));
        }
        CheckBlock::new("lattice.axioms")
            .residual("commutativity", comm, AXIOM_TOL)
            .residual("associativity", assoc, AXIOM_TOL)
            .residual("idempotency", idem, AXIOM_TOL)
            .residual("absorption", absorb, AXIOM_TOL)
            .certificates(json!({ "samples": samples, "seed": seed }))
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// `T` commutes with `sup_P` and `inf_P` on sampled pairs from `im P`, and
/// the inverse on `E_rev` (when given) is positive.
pub fn verify_lattice_isomorphism(
    op: &OperatorMatrix,
    proj: &ProjectionMatrix,
    order: &ConeOrder,
    inverse: Option<&InverseOnRev>,
    samples: usize,
    seed: u64,
) -> Result<CheckBlock> {
    require_positive(op, order)?;
    let lat = induced_lattice_ops(proj, order)?;
    let t = op.matrix().real_part();
    let apply = |x: &[f64]| -> Vec<f64> { t.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sup_res, mut inf_res) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let x = lat.sample(&mut rng);
        let y = lat.sample(&mut rng);
        let (tx, ty) = (apply(&x), apply(&y));
        sup_res = sup_res.max(dist(&apply(&lat.sup(&x, &y)), &lat.sup(&tx, &ty)));
        inf_res = inf_res.max(dist(&apply(&lat.inf(&x, &y)), &lat.inf(&tx, &ty)));
    }
    let mut block = CheckBlock::new("lattice.isomorphism")
        .residual("sup_commutation", sup_res, ISOMORPHISM_TOL)
        .residual("inf_commutation", inf_res, ISOMORPHISM_TOL)
        .certificates(json!({ "samples": samples, "seed": seed }));
    if let Some(inv) = inverse {
        block = block
            .residual("inverse_negative_part", (-inv.j.min_real()).max(0.0), order.tol_pos)
            .residual("inverse_max_imag", inv.j.max_imag(), order.tol_pos);
    }
    Ok(block)
}
