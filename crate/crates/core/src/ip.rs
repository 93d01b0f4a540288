//! Finite-sums sets, length-`m` FS-sequence search and return-time sets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::jdlg::Decomposition;
use crate::linalg::matrix::{norm, sub_vec};
use crate::linalg::{eigen_decompose, OperatorMatrix, C64};
use crate::parallel::Execution;
use crate::report::CheckBlock;

pub const MAX_SUMS_LEN: usize = 20;
pub const MAX_SEARCH_LEN: usize = 8;
pub const DEFAULT_WITNESS_LEN: usize = 4;
/// Largest root-of-unity order recognised by [`verify_ip_recurrence`].
pub const MAX_ROOT_ORDER: u64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IpWitness {
    pub sequence: Vec<u64>,
    pub fs: Vec<u64>,
}

impl IpWitness {
    pub fn new(sequence: Vec<u64>) -> Result<Self> {
        let fs = finite_sums(&sequence)?.into_iter().collect();
        Ok(Self { sequence, fs })
    }
}

/// All sums over nonempty subsets of a strictly increasing positive sequence.
pub fn finite_sums(xs: &[u64]) -> Result<BTreeSet<u64>> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("empty sequence".into()));
    }
    if xs.len() > MAX_SUMS_LEN {
        return Err(Error::InvalidInput(format!("length {} exceeds {MAX_SUMS_LEN}", xs.len())));
    }
    if xs[0] == 0 || xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("sequence must be positive and strictly increasing".into()));
    }
    let mut sums: Vec<u64> = Vec::with_capacity(1 << xs.len());
    for &x in xs {
        let prev = sums.len();
        for i in 0..prev {
            sums.push(sums[i] + x);
        }
        sums.push(x);
    }
    Ok(sums.into_iter().collect())
}

/// Lexicographically first strictly increasing `x₁ < … < x_m ≤ bound` with
/// every finite sum in `a`, or `None` after exhaustive search.
pub fn find_fs_sequence(a: &BTreeSet<u64>, m: usize, bound: u64) -> Result<Option<IpWitness>> {
    find_fs_sequence_with(a, m, bound, Execution::default())
}

pub fn find_fs_sequence_with(a: &BTreeSet<u64>, m: usize, bound: u64, exec: Execution) -> Result<Option<IpWitness>> {
    if m == 0 || m > MAX_SEARCH_LEN {
        return Err(Error::InvalidInput(format!("witness length must be in 1..={MAX_SEARCH_LEN}")));
    }
    if a.iter().any(|&x| x == 0 || x > bound) {
        return Err(Error::InvalidInput(format!("set must lie in [1, {bound}]")));
    }
    let candidates: Vec<u64> = a.iter().copied().collect();
    let found = exec.find_map_first(candidates.len(), |i| {
        let mut seq = vec![candidates[i]];
        let mut sums = vec![candidates[i]];
        if extend(a, &candidates, i + 1, m, &mut seq, &mut sums) {
            Some(seq)
        } else {
            None
        }
    });
    found.map(IpWitness::new).transpose()
}

fn extend(a: &BTreeSet<u64>, cand: &[u64], from: usize, m: usize, seq: &mut Vec<u64>, sums: &mut Vec<u64>) -> bool {
    if seq.len() == m {
        return true;
    }
    for (j, &x) in cand.iter().enumerate().skip(from) {
        if !sums.iter().all(|s| a.contains(&(s + x))) {
            continue;
        }
        let prev = sums.len();
        for i in 0..prev {
            sums.push(sums[i] + x);
        }
        sums.push(x);
        seq.push(x);
        if extend(a, cand, j + 1, m, seq, sums) {
            return true;
        }
        seq.pop();
        sums.truncate(prev);
    }
    false
}

/// `{ n ≤ N : ‖Tⁿx − x‖ < epsilon }`.
pub fn return_time_set(op: &OperatorMatrix, x: &[C64], epsilon: f64, horizon: usize) -> Vec<usize> {
    let t = op.matrix();
    let mut y = x.to_vec();
    let mut out = Vec::new();
    for n in 1..=horizon {
        y = t.mul_vec(&y);
        if norm(&sub_vec(&y, x)) < epsilon {
            out.push(n);
        }
    }
    out
}

/// Smallest `k ≤ MAX_ROOT_ORDER` with `λᵏ = 1` up to `tol`.
pub fn root_of_unity_order(lambda: C64, tol: f64) -> Option<u64> {
    if (lambda.norm() - 1.0).abs() > tol {
        return None;
    }
    let mut p = lambda;
    for k in 1..=MAX_ROOT_ORDER {
        if (p - 1.0).norm() <= tol * k as f64 {
            return Some(k);
        }
        p *= lambda;
    }
    None
}

/// Every `E_rev` basis vector has a return set containing a length-`m` FS
/// set; eigenvectors for a primitive `k`-th root of unity return exactly on
/// `kℕ`.
pub fn verify_ip_recurrence(
    op: &OperatorMatrix,
    d: &Decomposition,
    epsilon: f64,
    horizon: usize,
    m: usize,
) -> Result<CheckBlock> {
    let mut witnesses = Vec::new();
    for (i, x) in d.rev_basis.vectors.iter().enumerate() {
        let r: BTreeSet<u64> = return_time_set(op, x, epsilon, horizon).into_iter().map(|n| n as u64).collect();
        match find_fs_sequence(&r, m, horizon as u64)? {
            Some(w) => witnesses.push(w),
            None => {
                return Err(Error::HorizonTooSmall {
                    horizon,
                    detail: format!("no length-{m} FS witness in the return set of rev vector {i} ({} returns)", r.len()),
                })
            }
        }
    }

    let eig = eigen_decompose(op)?;
    let mut exact_mismatches = 0usize;
    let mut multiples_mismatches = 0usize;
    let mut checked = Vec::new();
    for space in &eig.eigenspaces {
        let Some(k) = root_of_unity_order(space.value, 1e-9) else { continue };
        for v in &space.vectors {
            let gap = if k == 1 { 2.0 } else { (C64::from_polar(1.0, std::f64::consts::TAU / k as f64) - 1.0).norm() };
            let eps = 0.25 * gap * norm(v);
            let r = return_time_set(op, v, eps, horizon);
            let expected: Vec<usize> = (1..=horizon).filter(|n| n % k as usize == 0).collect();
            if r != expected {
                exact_mismatches += 1;
            }
            let rs: BTreeSet<u64> = r.iter().map(|&n| n as u64).collect();
            if let Some(w) = find_fs_sequence(&rs, m, horizon as u64)? {
                if w.fs.iter().any(|s| s % k != 0) {
                    multiples_mismatches += 1;
                }
            }
            checked.push(json!({ "order": k, "epsilon": eps, "returns": r.len() }));
        }
    }

    Ok(CheckBlock::new("ip.recurrence")
        .condition("every_rev_vector_has_witness", witnesses.len() == d.rev_dim())
        .residual("root_of_unity_return_mismatches", exact_mismatches as f64, 0.0)
        .residual("fs_outside_multiples", multiples_mismatches as f64, 0.0)
        .certificates(json!({ "witnesses": witnesses, "root_of_unity_eigenvectors": checked })))
}
