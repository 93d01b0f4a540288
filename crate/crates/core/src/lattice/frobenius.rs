//! Combinatorial Perron–Frobenius prediction of the peripheral spectrum of a
//! nonnegative matrix: strongly connected components of the support graph,
//! their periods and Perron roots.

use std::collections::VecDeque;
use std::f64::consts::TAU;

use serde::Serialize;

use super::peripheral::{cluster_angles, PeripheralSpectrum, TOL_ANGLE, TOL_RADIUS_REL};
use crate::error::{Error, Result};
use crate::linalg::power::perron_root;
use crate::linalg::OperatorMatrix;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrobeniusComponent {
    pub vertices: Vec<usize>,
    pub radius: f64,
    /// gcd of cycle lengths; `None` for a single vertex without a loop.
    pub period: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrobeniusPrediction {
    pub components: Vec<FrobeniusComponent>,
    pub spectrum: PeripheralSpectrum,
}

impl FrobeniusPrediction {
    /// Periods of the components attaining the spectral radius.
    pub fn periods(&self) -> Vec<usize> {
        let r = self.spectrum.radius;
        if r == 0.0 {
            return Vec::new();
        }
        self.components
            .iter()
            .filter(|c| c.radius >= r - 1e-9 * (1.0 + r))
            .filter_map(|c| c.period)
            .collect()
    }
}

/// Tarjan's algorithm; components in reverse topological order.
pub fn strongly_connected_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct State<'a> {
        adj: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(s: &mut State, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for i in 0..s.adj[v].len() {
            let w = s.adj[v][i];
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = s.stack.pop().expect("tarjan stack");
                s.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            s.out.push(comp);
        }
    }
    let n = adj.len();
    let mut s = State {
        adj,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Period of a strongly connected vertex set: gcd of `level(u) + 1 − level(v)`
/// over its edges, with BFS levels from the first vertex.
fn period(comp: &[usize], adj: &[Vec<usize>]) -> Option<usize> {
    let member = |v: usize| comp.binary_search(&v).is_ok();
    let has_edge = comp.iter().any(|&u| adj[u].iter().any(|&v| member(v)));
    if !has_edge {
        return None;
    }
    let mut level = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::from([comp[0]]);
    level[comp[0]] = 0;
    while let Some(u) = queue.pop_front() {
        for &v in adj[u].iter().filter(|&&v| member(v)) {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g = 0;
    for &u in comp {
        for &v in adj[u].iter().filter(|&&v| member(v)) {
            g = gcd(g, (level[u] + 1).abs_diff(level[v]));
        }
    }
    Some(g)
}

pub fn frobenius_oracle(op: &OperatorMatrix) -> Result<FrobeniusPrediction> {
    let tol = op.tol();
    if !op.is_nonnegative(tol) {
        return Err(Error::NotPositive("frobenius oracle needs an entrywise nonnegative matrix".into()));
    }
    let a = op.matrix().real_part();
    let n = a.len();
    let adj: Vec<Vec<usize>> = a.iter().map(|row| (0..n).filter(|&j| row[j] > 0.0).collect()).collect();
    let components: Vec<FrobeniusComponent> = strongly_connected_components(&adj)
        .into_iter()
        .map(|vertices| {
            let period = period(&vertices, &adj);
            let radius = if period.is_none() {
                0.0
            } else {
                let sub: Vec<Vec<f64>> = vertices.iter().map(|&i| vertices.iter().map(|&j| a[i][j].max(0.0)).collect()).collect();
                perron_root(&sub)
            };
            FrobeniusComponent { vertices, radius, period }
        })
        .collect();
    let r = components.iter().map(|c| c.radius).fold(0.0, f64::max);
    let mut pred = FrobeniusPrediction {
        components,
        spectrum: PeripheralSpectrum { radius: r, angles: Vec::new(), tol_r: TOL_RADIUS_REL * (1.0 + r), tol_angle: TOL_ANGLE },
    };
    let angles: Vec<f64> = pred
        .periods()
        .into_iter()
        .flat_map(|h| (0..h).map(move |j| TAU * j as f64 / h as f64))
        .collect();
    pred.spectrum.angles = cluster_angles(angles, TOL_ANGLE);
    Ok(pred)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(rows: &[Vec<f64>]) -> OperatorMatrix {
        OperatorMatrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn oracle_examples() {
        let c3 = frobenius_oracle(&op(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]])).unwrap();
        assert_eq!(c3.periods(), vec![3]);
        assert_eq!(c3.spectrum.angles.len(), 3);

        let swap = frobenius_oracle(&op(&[vec![0.0, 1.0], vec![1.0, 0.0]])).unwrap();
        assert_eq!(swap.periods(), vec![2]);

        let loops = frobenius_oracle(&op(&[vec![0.5, 0.5], vec![0.0, 0.5]])).unwrap();
        assert_eq!(loops.spectrum.angles, vec![0.0]);
        assert!((loops.spectrum.radius - 0.5).abs() < 1e-9);
        assert_eq!(loops.components.len(), 2);

        let nil = frobenius_oracle(&op(&[vec![0.0, 1.0], vec![0.0, 0.0]])).unwrap();
        assert_eq!(nil.spectrum.radius, 0.0);
        assert!(nil.spectrum.angles.is_empty());
    }

    #[test]
    fn mixed_periods_union() {
        // 2-cycle on {0,1}, 3-cycle on {2,3,4}, a transient edge between them
        let mut m = vec![vec![0.0; 5]; 5];
        m[0][1] = 1.0;
        m[1][0] = 1.0;
        m[2][3] = 1.0;
        m[3][4] = 1.0;
        m[4][2] = 1.0;
        m[0][2] = 0.0;
        let p = frobenius_oracle(&op(&m)).unwrap();
        let mut periods = p.periods();
        periods.sort();
        assert_eq!(periods, vec![2, 3]);
        assert_eq!(p.spectrum.angles.len(), 4);
    }

    #[test]
    fn period_with_shortcut() {
        // cycles of lengths 2 and 3 through vertex 0: period 1
        let adj = vec![vec![1], vec![0, 2], vec![0]];
        let comps = strongly_connected_components(&adj);
        assert_eq!(comps, vec![vec![0, 1, 2]]);
        assert_eq!(period(&comps[0], &adj), Some(1));
    }
}
