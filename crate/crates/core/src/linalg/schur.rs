//! Complex Schur decomposition: Householder reduction to Hessenberg form
//! followed by single-shift QR sweeps with Wilkinson shifts, plus reordering
//! of the triangular factor by adjacent Givens swaps.

use super::matrix::{Matrix, C64, ZERO};
use crate::error::{Error, Result};

/// `A = Q T Qᴴ` with `Q` unitary and `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur {
    pub q: Matrix,
    pub t: Matrix,
}

/// QR sweeps allowed per unit of dimension.
pub const SWEEPS_PER_DIM: usize = 100;

impl Schur {
    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.rows()).map(|i| self.t[(i, i)]).collect()
    }

    /// Move every selected diagonal entry to the leading block, keeping the
    /// relative order inside both groups. Returns the size of the leading block.
    pub fn reorder(&mut self, select: &[bool]) -> usize {
        let n = self.t.rows();
        assert_eq!(select.len(), n);
        let mut flags = select.to_vec();
        let mut k = 0;
        for i in 0..n {
            if flags[i] {
                let mut j = i;
                while j > k {
                    self.swap_adjacent(j - 1);
                    flags.swap(j - 1, j);
                    j -= 1;
                }
                k += 1;
            }
        }
        k
    }

    /// Exchange the diagonal entries at `k` and `k + 1`.
    fn swap_adjacent(&mut self, k: usize) {
        let n = self.t.rows();
        let a = self.t[(k, k)];
        let b = self.t[(k + 1, k + 1)];
        let t = self.t[(k, k + 1)];
        // First column of the rotation is an eigenvector of [[a, t], [0, b]] for b.
        let (v1, v2) = (t, b - a);
        let r = (v1.norm_sqr() + v2.norm_sqr()).sqrt();
        if r == 0.0 {
            return;
        }
        let (g11, g21) = (v1 / r, v2 / r);
        let (g12, g22) = (-g21.conj(), g11.conj());
        // T ← Gᴴ T
        for j in 0..n {
            let x = self.t[(k, j)];
            let y = self.t[(k + 1, j)];
            self.t[(k, j)] = g11.conj() * x + g21.conj() * y;
            self.t[(k + 1, j)] = g12.conj() * x + g22.conj() * y;
        }
        // T ← T G, Q ← Q G
        for m in [&mut self.t, &mut self.q] {
            for i in 0..n {
                let x = m[(i, k)];
                let y = m[(i, k + 1)];
                m[(i, k)] = x * g11 + y * g21;
                m[(i, k + 1)] = x * g12 + y * g22;
            }
        }
        self.t[(k + 1, k)] = ZERO;
        self.t[(k, k)] = b;
        self.t[(k + 1, k + 1)] = a;
    }
}

/// Reduce `a` to upper Hessenberg form `H = Qᴴ A Q`.
pub fn hessenberg(a: &Matrix) -> (Matrix, Matrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = Matrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if xnorm == 0.0 || tail == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let mut v = x.clone();
        v[0] += phase * xnorm;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vnorm2;
        // H ← (I − τ v vᴴ) H on rows k+1..n
        for j in 0..n {
            let s: C64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= vi * s * tau;
            }
        }
        // H ← H (I − τ v vᴴ), Q ← Q (I − τ v vᴴ)
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let s: C64 = v.iter().enumerate().map(|(l, vl)| m[(i, k + 1 + l)] * vl).sum();
                for (l, vl) in v.iter().enumerate() {
                    m[(i, k + 1 + l)] -= s * vl.conj() * tau;
                }
            }
        }
        for i in (k + 2)..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

/// Givens pair `(c, s)` with `[[c, s], [−s̄, c]]·[f; g] = [r; 0]`.
fn givens(f: C64, g: C64) -> (f64, C64) {
    let fa = f.norm();
    let ga = g.norm();
    if ga == 0.0 {
        return (1.0, ZERO);
    }
    if fa == 0.0 {
        return (0.0, g.conj() / ga);
    }
    let r = (fa * fa + ga * ga).sqrt();
    (fa / r, (f / fa) * g.conj() / r)
}

fn rotate_rows(m: &mut Matrix, k: usize, c: f64, s: C64) {
    for j in 0..m.cols() {
        let x = m[(k, j)];
        let y = m[(k + 1, j)];
        m[(k, j)] = x * c + s * y;
        m[(k + 1, j)] = -s.conj() * x + y * c;
    }
}

fn rotate_cols(m: &mut Matrix, k: usize, c: f64, s: C64) {
    for i in 0..m.rows() {
        let x = m[(i, k)];
        let y = m[(i, k + 1)];
        m[(i, k)] = x * c + y * s.conj();
        m[(i, k + 1)] = -x * s + y * c;
    }
}

/// Complex Schur decomposition.
///
/// Deflation uses the standard relative test
/// `|h[i,i-1]| ≤ ε_mach (|h[i,i]| + |h[i-1,i-1]|)`. Fails with
/// [`Error::NonConvergence`] after `SWEEPS_PER_DIM · n` sweeps.
pub fn schur(a: &Matrix) -> Result<Schur> {
    let n = a.rows();
    if n == 0 {
        return Ok(Schur { q: Matrix::zeros(0, 0), t: Matrix::zeros(0, 0) });
    }
    let (mut h, mut z) = hessenberg(a);
    let anorm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let cap = SWEEPS_PER_DIM * n;
    let mut sweeps = 0usize;
    let mut hi = n - 1;
    let mut since_deflation = 0usize;
    while hi > 0 {
        // locate the start of the active unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == 0.0 {
                diag = anorm;
            }
            if sub <= f64::EPSILON * diag {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if sweeps >= cap {
            return Err(Error::NonConvergence { iterations: sweeps });
        }
        sweeps += 1;
        since_deflation += 1;

        let shift = if since_deflation.is_multiple_of(11) {
            // exceptional shift breaks symmetric stalls (e.g. cyclic permutations)
            let c = h[(hi, hi - 1)].norm();
            h[(hi, hi)] + C64::new(0.75 * c, 0.4375 * c)
        } else {
            let a11 = h[(hi - 1, hi - 1)];
            let a12 = h[(hi - 1, hi)];
            let a21 = h[(hi, hi - 1)];
            let a22 = h[(hi, hi)];
            let half = (a11 - a22) * 0.5;
            let disc = (half * half + a12 * a21).sqrt();
            let m1 = (a11 + a22) * 0.5 + disc;
            let m2 = (a11 + a22) * 0.5 - disc;
            if (m1 - a22).norm() <= (m2 - a22).norm() {
                m1
            } else {
                m2
            }
        };

        // implicit single-shift sweep on rows/cols lo..=hi
        let (c, s) = givens(h[(lo, lo)] - shift, h[(lo + 1, lo)]);
        rotate_rows(&mut h, lo, c, s);
        rotate_cols(&mut h, lo, c, s);
        rotate_cols(&mut z, lo, c, s);
        for k in (lo + 1)..hi {
            let (c, s) = givens(h[(k, k - 1)], h[(k + 1, k - 1)]);
            rotate_rows(&mut h, k, c, s);
            rotate_cols(&mut h, k, c, s);
            rotate_cols(&mut z, k, c, s);
            h[(k + 1, k - 1)] = ZERO;
        }
    }
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { q: z, t: h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check(a: &Matrix, s: &Schur) {
        let n = a.rows();
        let rec = s.q.matmul(&s.t).matmul(&s.q.adjoint());
        assert!(rec.dist(a) < 1e-12 * (1.0 + a.frobenius_norm()), "reconstruction {}", rec.dist(a));
        assert!(s.q.adjoint().matmul(&s.q).dist(&Matrix::identity(n)) < 1e-12);
        for i in 0..n {
            for j in 0..i {
                assert_eq!(s.t[(i, j)], ZERO);
            }
        }
    }

    #[test]
    fn random_matrices_decompose() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 3, 5, 8, 13, 24] {
            let a = Matrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let s = schur(&a).unwrap();
            check(&a, &s);
        }
    }

    #[test]
    fn cyclic_permutation_does_not_stall() {
        for n in [2, 3, 5, 7] {
            let a = Matrix::from_fn(n, n, |i, j| if j == (i + 1) % n { C64::new(1.0, 0.0) } else { ZERO });
            let s = schur(&a).unwrap();
            check(&a, &s);
            for ev in s.eigenvalues() {
                assert!((ev.norm() - 1.0).abs() < 1e-12);
                assert!((ev.powu(n as u32) - 1.0).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn reorder_preserves_factorization() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 7;
        let a = Matrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let mut s = schur(&a).unwrap();
        let before = s.eigenvalues();
        let select: Vec<bool> = before.iter().map(|z| z.norm() < 0.8).collect();
        let k = s.reorder(&select);
        check(&a, &s);
        let after = s.eigenvalues();
        assert_eq!(k, select.iter().filter(|&&b| b).count());
        for (i, ev) in after.iter().enumerate() {
            assert_eq!(ev.norm() < 0.8, i < k);
        }
        let mut b: Vec<f64> = before.iter().map(|z| z.re).collect();
        let mut c: Vec<f64> = after.iter().map(|z| z.re).collect();
        b.sort_by(f64::total_cmp);
        c.sort_by(f64::total_cmp);
        for (x, y) in b.iter().zip(&c) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
