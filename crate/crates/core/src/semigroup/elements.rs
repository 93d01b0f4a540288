//! Concrete semigroup elements: self-maps of a finite set, boolean matrices
//! and complex matrices compared up to `epsilon`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{null_space, subspace_distance, svd, Matrix, C64};

pub trait Element: Clone {
    fn product(&self, rhs: &Self) -> Self;

    /// Exact identity key; `None` means elements are compared with `close`.
    fn key(&self) -> Option<Vec<u64>> {
        None
    }

    fn close(&self, other: &Self, epsilon: f64) -> bool;
}

/// Self-map of `{0..k-1}` given by its image array; `(a·b)(x) = a(b(x))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Transformation(pub Vec<usize>);

impl Transformation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        if k == 0 || images.iter().any(|&i| i >= k) {
            return Err(Error::InvalidInput(format!("transformation {images:?} is not a self-map of 0..{k}")));
        }
        Ok(Self(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// The partition `x ~ y ⇔ f(x) = f(y)`, labelled by first occurrence.
    pub fn kernel(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.degree()];
        let mut next = 0;
        self.0
            .iter()
            .map(|&v| {
                if label[v] == usize::MAX {
                    label[v] = next;
                    next += 1;
                }
                label[v]
            })
            .collect()
    }

    pub fn image(&self) -> Vec<usize> {
        let mut im = self.0.clone();
        im.sort_unstable();
        im.dedup();
        im
    }
}

impl Element for Transformation {
    fn product(&self, rhs: &Self) -> Self {
        Self(rhs.0.iter().map(|&x| self.0[x]).collect())
    }

    fn key(&self) -> Option<Vec<u64>> {
        Some(self.0.iter().map(|&x| x as u64).collect())
    }

    fn close(&self, other: &Self, _epsilon: f64) -> bool {
        self == other
    }
}

/// Square matrix over the boolean semiring, acting on `{0,1}^k` by `v ↦ Mv`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoolMatrix(pub Vec<Vec<bool>>);

pub const MAX_BOOL_DIM: usize = 12;

impl BoolMatrix {
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 || k > MAX_BOOL_DIM || rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidInput(format!("boolean matrix must be square of size 1..={MAX_BOOL_DIM}")));
        }
        Ok(Self(rows))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Image of the bit vector `v` (bit `j` is coordinate `j`).
    pub fn apply(&self, v: u32) -> u32 {
        self.0.iter().enumerate().fold(0, |acc, (i, row)| {
            if row.iter().enumerate().any(|(j, &b)| b && v >> j & 1 == 1) {
                acc | 1 << i
            } else {
                acc
            }
        })
    }

    /// The induced self-map of `{0,1}^k`.
    pub fn as_transformation(&self) -> Transformation {
        Transformation((0..1u32 << self.dim()).map(|v| self.apply(v) as usize).collect())
    }
}

impl Element for BoolMatrix {
    fn product(&self, rhs: &Self) -> Self {
        let k = self.dim();
        Self((0..k).map(|i| (0..k).map(|j| (0..k).any(|l| self.0[i][l] && rhs.0[l][j])).collect()).collect())
    }

    fn key(&self) -> Option<Vec<u64>> {
        Some(self.0.iter().map(|r| r.iter().enumerate().fold(0u64, |a, (j, &b)| a | (b as u64) << j)).collect())
    }

    fn close(&self, other: &Self, _epsilon: f64) -> bool {
        self == other
    }
}

/// Complex matrix; two products are identified when their Frobenius
/// distance is below `epsilon`.
#[derive(Debug, Clone)]
pub struct CollapsedMatrix(pub Matrix);

impl Element for CollapsedMatrix {
    fn product(&self, rhs: &Self) -> Self {
        Self(self.0.matmul(&rhs.0))
    }

    fn close(&self, other: &Self, epsilon: f64) -> bool {
        self.0.dist(&other.0) < epsilon
    }
}

/// Underlying objects of a generated semigroup, one per element.
#[derive(Debug, Clone)]
pub enum ElementMeta {
    Transformations(Vec<Transformation>),
    BoolMatrices(Vec<BoolMatrix>),
    Matrices { elements: Vec<Matrix>, tol: f64 },
}

impl ElementMeta {
    pub fn len(&self) -> usize {
        match self {
            Self::Transformations(v) => v.len(),
            Self::BoolMatrices(v) => v.len(),
            Self::Matrices { elements, .. } => elements.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn same_kernel(&self, a: usize, b: usize) -> bool {
        match self {
            Self::Transformations(v) => v[a].kernel() == v[b].kernel(),
            Self::BoolMatrices(v) => v[a].as_transformation().kernel() == v[b].as_transformation().kernel(),
            Self::Matrices { elements, tol } => {
                let ka = null_space(&elements[a], tol * elements[a].frobenius_norm().max(1.0));
                let kb = null_space(&elements[b], tol * elements[b].frobenius_norm().max(1.0));
                subspace_distance(&ka, &kb) <= 1e-6
            }
        }
    }

    pub fn same_image(&self, a: usize, b: usize) -> bool {
        match self {
            Self::Transformations(v) => v[a].image() == v[b].image(),
            Self::BoolMatrices(v) => v[a].as_transformation().image() == v[b].as_transformation().image(),
            Self::Matrices { elements, tol } => {
                let ra = range(&elements[a], *tol);
                let rb = range(&elements[b], *tol);
                subspace_distance(&ra, &rb) <= 1e-6
            }
        }
    }
}

fn range(m: &Matrix, tol: f64) -> Vec<Vec<C64>> {
    let d = svd(m);
    let cut = tol * m.frobenius_norm().max(1.0);
    (0..d.sigma.len()).filter(|&k| d.sigma[k] > cut).map(|k| d.u.column(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transformation_composition_applies_right_first() {
        let swap = Transformation::new(vec![1, 0]).unwrap();
        let c0 = Transformation::new(vec![0, 0]).unwrap();
        assert_eq!(swap.product(&c0).0, vec![1, 1]);
        assert_eq!(c0.product(&swap).0, vec![0, 0]);
        assert_eq!(Transformation(vec![2, 2, 0]).kernel(), vec![0, 0, 1]);
        assert_eq!(Transformation(vec![2, 2, 0]).image(), vec![0, 2]);
        assert!(Transformation::new(vec![0, 2]).is_err());
    }

    #[test]
    fn boolean_action_matches_product() {
        let a = BoolMatrix::new(vec![vec![false, true], vec![false, false]]).unwrap();
        let b = BoolMatrix::new(vec![vec![true, false], vec![true, true]]).unwrap();
        let ab = a.product(&b);
        for v in 0..4 {
            assert_eq!(ab.apply(v), a.apply(b.apply(v)));
        }
        assert_eq!(a.product(&a), BoolMatrix(vec![vec![false; 2]; 2]));
    }
}
