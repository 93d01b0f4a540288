//! Power iteration for the Perron root of a nonnegative real matrix.

pub const POWER_MAX_ITER: usize = 10_000;
pub const POWER_REL_TOL: f64 = 1e-12;

/// Perron root `r(A)` of an entrywise nonnegative square matrix.
///
/// Iterates on `A + I`, whose Perron root is `r(A) + 1` and which is
/// primitive on every irreducible block, so periodic matrices converge too.
/// Meant for irreducible matrices; on a defective reducible matrix the
/// iteration converges only sublinearly. Returns the estimate after `POWER_MAX_ITER` steps if the relative change
/// has not dropped below `POWER_REL_TOL`.
pub fn perron_root(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut estimate = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let y: Vec<f64> = (0..n).map(|i| x[i] + a[i].iter().zip(&x).map(|(aij, xj)| aij * xj).sum::<f64>()).collect();
        let s: f64 = y.iter().sum();
        let x_sum: f64 = x.iter().sum();
        let next = s / x_sum;
        x = y.iter().map(|v| v / s).collect();
        if (next - estimate).abs() <= POWER_REL_TOL * next {
            estimate = next;
            break;
        }
        estimate = next;
    }
    (estimate - 1.0).max(0.0)
}
