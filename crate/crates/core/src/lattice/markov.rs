//! Composition operators `f ↦ f∘φ` on functions over a finite set: Markov
//! algebra homomorphisms, under which powers of unimodular eigenvectors are
//! again eigenvectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::linalg::matrix::{norm, sub_vec, ONE, ZERO};
use crate::linalg::{eigen_decompose, Matrix, OperatorMatrix, C64};
use crate::report::CheckBlock;

pub const POWER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionOperator {
    pub map: Vec<usize>,
}

impl CompositionOperator {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        if map.is_empty() || map.iter().any(|&j| j >= map.len()) {
            return Err(Error::InvalidInput("point map must be a total self-map of {0..m-1}".into()));
        }
        Ok(Self { map })
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    /// `(Tf)(i) = f(φ(i))`.
    pub fn matrix(&self) -> Matrix {
        let m = self.size();
        Matrix::from_fn(m, m, |i, j| if self.map[i] == j { ONE } else { ZERO })
    }

    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        self.map.iter().map(|&j| f[j]).collect()
    }
}

fn pointwise(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// Divides `x` by its modulus on the support if the modulus is constant
/// there; `None` otherwise.
fn unimodular_on_support(x: &[C64]) -> Option<Vec<C64>> {
    let top = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if top == 0.0 {
        return None;
    }
    let cut = 1e-8 * top;
    let support: Vec<f64> = x.iter().map(|z| z.norm()).filter(|&a| a > cut).collect();
    let (lo, hi) = support.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &a| (l.min(a), h.max(a)));
    if hi - lo > 1e-8 * hi {
        return None;
    }
    Some(x.iter().map(|z| if z.norm() > cut { z / z.norm() } else { ZERO }).collect())
}

pub fn markov_power_mechanism(c: &CompositionOperator, k_max: usize, seed: u64) -> Result<CheckBlock> {
    let m = c.size();
    let t = c.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mult: f64 = 0.0;
    for _ in 0..32 {
        let f: Vec<C64> = (0..m).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let g: Vec<C64> = (0..m).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let lhs = t.mul_vec(&pointwise(&f, &g));
        let rhs = pointwise(&t.mul_vec(&f), &t.mul_vec(&g));
        mult = mult.max(norm(&sub_vec(&lhs, &rhs)));
    }
    let ones = vec![ONE; m];
    let markov = norm(&sub_vec(&t.mul_vec(&ones), &ones));

    let op = OperatorMatrix::with_default_tol(t.clone())?;
    let eig = eigen_decompose(&op)?;
    let mut power_res: f64 = 0.0;
    let mut spectrum_gap: f64 = 0.0;
    let (mut checked, mut skipped) = (0usize, 0usize);
    for space in eig.eigenspaces.iter().filter(|s| (s.value.norm() - 1.0).abs() <= 1e-9) {
        // basis vectors, plus projections of coordinate vectors which separate
        // eigenvectors living on disjoint cycles
        let basis = Matrix::from_columns(m, &space.vectors);
        let bh = basis.adjoint();
        let mut candidates = space.vectors.clone();
        for i in 0..m {
            let coeffs: Vec<C64> = (0..space.vectors.len()).map(|k| bh[(k, i)]).collect();
            let v = basis.mul_vec(&coeffs);
            if norm(&v) > 1e-6 {
                candidates.push(v);
            }
        }
        let lambda = space.value;
        let mut any = false;
        for x in candidates {
            let Some(u) = unimodular_on_support(&x) else { continue };
            any = true;
            checked += 1;
            let mut uk = u.clone();
            let mut lk = lambda;
            for _ in 1..=k_max {
                let r = norm(&sub_vec(&t.mul_vec(&uk), &uk.iter().map(|z| z * lk).collect::<Vec<_>>()));
                power_res = power_res.max(r);
                spectrum_gap = spectrum_gap.max(eig.spectrum.distance_to(lk));
                uk = pointwise(&uk, &u);
                lk *= lambda;
            }
        }
        if !any {
            skipped += 1;
        }
    }
    let mut block = CheckBlock::new("lattice.markov_power")
        .residual("multiplicativity", mult, 1e-15 * m as f64)
        .residual("markov", markov, 0.0)
        .residual("power_eigen_residual", power_res, POWER_TOL)
        .residual("power_in_spectrum", spectrum_gap, 1e-8)
        .certificates(json!({ "eigenvectors_checked": checked, "eigenspaces_skipped": skipped, "k_max": k_max }));
    if skipped > 0 {
        block = block.note("eigenspaces without an eigenvector of constant modulus on its support were skipped");
    }
    Ok(block)
}
