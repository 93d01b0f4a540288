//! LU solves, one-sided Jacobi SVD, rank and subspace utilities.

use super::matrix::{inner, norm, Matrix, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// `A⁻¹` by LU with partial pivoting.
pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::InvalidMatrix(format!("inverse of {}x{} matrix", a.rows(), a.cols())));
    }
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let mut lu = a.clone();
    let mut inv = Matrix::identity(n);
    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|i| (i, lu[(i, k)].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= 1e-14 * scale {
            return Err(Error::Singular { pivot: k });
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
                let t = inv[(k, j)];
                inv[(k, j)] = inv[(p, j)];
                inv[(p, j)] = t;
            }
        }
        let d = lu[(k, k)];
        for i in 0..n {
            if i == k {
                continue;
            }
            let f = lu[(i, k)] / d;
            if f == ZERO {
                continue;
            }
            for j in 0..n {
                let (lkj, ikj) = (lu[(k, j)], inv[(k, j)]);
                lu[(i, j)] -= f * lkj;
                inv[(i, j)] -= f * ikj;
            }
        }
    }
    for i in 0..n {
        let d = lu[(i, i)];
        for j in 0..n {
            inv[(i, j)] /= d;
        }
    }
    Ok(inv)
}

/// Thin SVD `A = U Σ Vᴴ` with singular values sorted descending.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows × cols`; columns with σ = 0 are zero vectors.
    pub u: Matrix,
    pub sigma: Vec<f64>,
    /// `cols × cols` unitary.
    pub v: Matrix,
}

const SVD_MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD. Rows ≥ cols is not required; the right
/// singular vectors are always complete.
pub fn svd(a: &Matrix) -> Svd {
    let m = a.rows();
    let n = a.cols();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            e
        })
        .collect();
    let fro = a.frobenius_norm();
    let negligible = (1e-3 * f64::EPSILON * fro).powi(2);
    for _ in 0..SVD_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|x| x.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|x| x.norm_sqr()).sum();
                if alpha.min(beta) <= negligible {
                    continue;
                }
                let gamma = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let pc = phase.conj();
                for vecs in [&mut cols, &mut v] {
                    let (left, right) = vecs.split_at_mut(q);
                    let (colp, colq) = (&mut left[p], &mut right[0]);
                    for (xp, xq) in colp.iter_mut().zip(colq.iter_mut()) {
                        let yq = *xq * pc;
                        let yp = *xp;
                        *xp = yp * c - yq * s;
                        *xq = (yp * s + yq * c) * phase;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(usize, f64)> = cols.iter().map(|c| norm(c)).enumerate().collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut u = Matrix::zeros(m, n);
    let mut vm = Matrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &(j, s)) in order.iter().enumerate() {
        sigma.push(s);
        if s > 0.0 {
            for i in 0..m {
                u[(i, k)] = cols[j][i] / s;
            }
        }
        for i in 0..n {
            vm[(i, k)] = v[j][i];
        }
    }
    Svd { u, sigma, v: vm }
}

/// Spectral norm `‖A‖₂`.
pub fn norm2(a: &Matrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    svd(a).sigma[0]
}

/// Number of singular values strictly above `threshold`.
pub fn rank(a: &Matrix, threshold: f64) -> usize {
    svd(a).sigma.iter().filter(|&&s| s > threshold).count()
}

/// Orthonormal basis of `{x : ‖Ax‖ ≤ threshold‖x‖}` (right singular vectors).
pub fn null_space(a: &Matrix, threshold: f64) -> Vec<Vec<C64>> {
    let d = svd(a);
    let n = a.cols();
    (0..n).filter(|&k| d.sigma[k] <= threshold).map(|k| d.v.column(k)).collect()
}

/// Modified Gram–Schmidt (twice) on the given vectors, dropping vectors whose
/// residual falls below `drop_tol` relative to their original norm.
pub fn orthonormalize(vectors: &[Vec<C64>], drop_tol: f64) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let original = norm(v);
        if original == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &w);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let r = norm(&w);
        if r > drop_tol * original {
            basis.push(w.iter().map(|x| x / r).collect());
        }
    }
    basis
}

/// Sine of the largest principal angle between two subspaces given by
/// orthonormal bases of equal dimension. Returns 1 when dimensions differ.
pub fn subspace_distance(a: &[Vec<C64>], b: &[Vec<C64>]) -> f64 {
    if a.len() != b.len() {
        return 1.0;
    }
    if a.is_empty() {
        return 0.0;
    }
    let n = a[0].len();
    // ‖(I − B Bᴴ) A‖₂
    let resid: Vec<Vec<C64>> = a
        .iter()
        .map(|x| {
            let mut r = x.clone();
            for y in b {
                let c = inner(y, x);
                for (ri, yi) in r.iter_mut().zip(y) {
                    *ri -= c * yi;
                }
            }
            r
        })
        .collect();
    norm2(&Matrix::from_columns(n, &resid)).min(1.0)
}
