//! Finite semigroups as Cayley tables: generation from concrete elements,
//! idempotents, ideals, Rees structure and the kernel/image correspondence
//! of minimal idempotents.

pub mod correspondence;
pub mod elements;
pub mod input;
pub mod structure;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use correspondence::minidem_correspondence;
pub use elements::{BoolMatrix, CollapsedMatrix, Element, ElementMeta, Transformation};
pub use input::{parse_generators, GeneratorInput};
pub use structure::{center, idempotent_order, idempotents, minimal_idempotents, minimal_ideals, rees_checks, IdealKind, IdealRecord};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const DEFAULT_CAP: usize = 4096;
/// Associativity is checked on all triples up to this size, sampled above.
pub const FULL_ASSOCIATIVITY_LIMIT: usize = 512;
const ASSOCIATIVITY_SAMPLES: usize = 200_000;

#[derive(Debug, Clone)]
pub struct FiniteSemigroup {
    cayley: Vec<Vec<usize>>,
    generators: Vec<usize>,
    /// Shortlex-least generator word per element, when generated.
    words: Option<Vec<Vec<usize>>>,
    meta: Option<ElementMeta>,
}

/// Cayley-table interchange format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyJson {
    pub size: usize,
    pub cayley: Vec<Vec<usize>>,
}

impl FiniteSemigroup {
    /// From a full table; every element counts as a generator.
    pub fn from_cayley(cayley: Vec<Vec<usize>>) -> Result<Self> {
        let m = cayley.len();
        if m == 0 || cayley.iter().any(|r| r.len() != m || r.iter().any(|&x| x >= m)) {
            return Err(Error::InvalidInput("cayley table must be a nonempty m×m array of indices < m".into()));
        }
        let s = Self { cayley, generators: (0..m).collect(), words: None, meta: None };
        s.check_associative(false)?;
        Ok(s)
    }

    pub fn from_json(c: &CayleyJson) -> Result<Self> {
        if c.size != c.cayley.len() {
            return Err(Error::InvalidInput(format!("size {} but {} rows", c.size, c.cayley.len())));
        }
        Self::from_cayley(c.cayley.clone())
    }

    pub fn to_json(&self) -> CayleyJson {
        CayleyJson { size: self.size(), cayley: self.cayley.clone() }
    }

    pub fn size(&self) -> usize {
        self.cayley.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a][b]
    }

    pub fn cayley(&self) -> &[Vec<usize>] {
        &self.cayley
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn words(&self) -> Option<&[Vec<usize>]> {
        self.words.as_deref()
    }

    pub fn meta(&self) -> Option<&ElementMeta> {
        self.meta.as_ref()
    }

    fn check_associative(&self, collapsed: bool) -> Result<()> {
        let m = self.size();
        let fail = |a, b, c| {
            if collapsed {
                Error::CollapseTooCoarse { a, b, c }
            } else {
                Error::NotAssociative { a, b, c }
            }
        };
        let t = &self.cayley;
        if m <= FULL_ASSOCIATIVITY_LIMIT {
            for a in 0..m {
                for b in 0..m {
                    let ab = t[a][b];
                    for c in 0..m {
                        if t[ab][c] != t[a][t[b][c]] {
                            return Err(fail(a, b, c));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
            for _ in 0..ASSOCIATIVITY_SAMPLES {
                let (a, b, c) = (rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m));
                if t[t[a][b]][c] != t[a][t[b][c]] {
                    return Err(fail(a, b, c));
                }
            }
        }
        Ok(())
    }
}

struct Index<E> {
    elements: Vec<E>,
    exact: HashMap<Vec<u64>, usize>,
    epsilon: f64,
}

impl<E: Element> Index<E> {
    fn find(&self, x: &E) -> Option<usize> {
        match x.key() {
            Some(k) => self.exact.get(&k).copied(),
            None => self.elements.iter().position(|y| y.close(x, self.epsilon)),
        }
    }

    fn insert(&mut self, x: E) -> usize {
        let i = self.elements.len();
        if let Some(k) = x.key() {
            self.exact.insert(k, i);
        }
        self.elements.push(x);
        i
    }
}

/// Breadth-first closure under right multiplication by generators, so each
/// element is labelled by its shortlex-least word. The full table is read
/// off the right Cayley graph by following words.
pub fn generate<E: Element>(gens: &[E], epsilon: f64, cap: usize) -> Result<(FiniteSemigroup, Vec<E>)> {
    if gens.is_empty() {
        return Err(Error::InvalidInput("no generators".into()));
    }
    let mut idx = Index { elements: Vec::new(), exact: HashMap::new(), epsilon };
    let mut words: Vec<Vec<usize>> = Vec::new();
    let mut gen_index = Vec::with_capacity(gens.len());
    for (g, x) in gens.iter().enumerate() {
        let i = match idx.find(x) {
            Some(i) => i,
            None => {
                words.push(vec![g]);
                idx.insert(x.clone())
            }
        };
        gen_index.push(i);
    }
    let mut right: Vec<Vec<usize>> = Vec::new();
    let mut head = 0;
    while head < idx.elements.len() {
        let mut row = Vec::with_capacity(gens.len());
        for (g, y) in gens.iter().enumerate() {
            let p = idx.elements[head].product(y);
            let j = match idx.find(&p) {
                Some(j) => j,
                None => {
                    if idx.elements.len() >= cap {
                        return Err(Error::SemigroupCapExceeded { cap });
                    }
                    let mut w = words[head].clone();
                    w.push(g);
                    words.push(w);
                    idx.insert(p)
                }
            };
            row.push(j);
        }
        right.push(row);
        head += 1;
    }
    let m = idx.elements.len();
    let cayley: Vec<Vec<usize>> = (0..m)
        .map(|a| (0..m).map(|b| words[b].iter().fold(a, |x, &g| right[x][g])).collect())
        .collect();
    let s = FiniteSemigroup { cayley, generators: gen_index, words: Some(words), meta: None };
    s.check_associative(epsilon > 0.0 && gens[0].key().is_none())?;
    Ok((s, idx.elements))
}

pub fn from_transformations(gens: &[Transformation], cap: usize) -> Result<FiniteSemigroup> {
    let k = gens[0].degree();
    if gens.iter().any(|g| g.degree() != k) {
        return Err(Error::InvalidInput("transformations act on sets of different sizes".into()));
    }
    let (mut s, els) = generate(gens, 0.0, cap)?;
    s.meta = Some(ElementMeta::Transformations(els));
    Ok(s)
}

pub fn from_bool_matrices(gens: &[BoolMatrix], cap: usize) -> Result<FiniteSemigroup> {
    let k = gens[0].dim();
    if gens.iter().any(|g| g.dim() != k) {
        return Err(Error::InvalidInput("boolean matrices of different sizes".into()));
    }
    let (mut s, els) = generate(gens, 0.0, cap)?;
    s.meta = Some(ElementMeta::BoolMatrices(els));
    Ok(s)
}

pub fn from_matrices(gens: &[Matrix], epsilon: f64, cap: usize) -> Result<FiniteSemigroup> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    let n = gens[0].rows();
    if gens.iter().any(|g| !g.is_square() || g.rows() != n) {
        return Err(Error::InvalidInput("matrices must be square of equal size".into()));
    }
    let wrapped: Vec<CollapsedMatrix> = gens.iter().cloned().map(CollapsedMatrix).collect();
    let (mut s, els) = generate(&wrapped, epsilon, cap)?;
    s.meta = Some(ElementMeta::Matrices { elements: els.into_iter().map(|c| c.0).collect(), tol: epsilon });
    Ok(s)
}

/// Cyclic group `ℤ_n` as a Cayley table.
pub fn cyclic_group(n: usize) -> FiniteSemigroup {
    FiniteSemigroup::from_cayley((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect())
        .expect("cyclic group table")
}

/// `{0..n-1}` with `ab = a`.
pub fn left_zero(n: usize) -> FiniteSemigroup {
    FiniteSemigroup::from_cayley((0..n).map(|a| vec![a; n]).collect()).expect("left-zero table")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn t(v: &[usize]) -> Transformation {
        Transformation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn full_t2_from_swap_and_constant() {
        let s = from_transformations(&[t(&[1, 0]), t(&[0, 0])], 100).unwrap();
        assert_eq!(s.size(), 4);
        assert_eq!(s.words().unwrap()[0], vec![0]);
        assert_eq!(s.words().unwrap()[1], vec![1]);
    }

    #[test]
    fn nilpotent_boolean_chain() {
        let g = BoolMatrix::new(vec![vec![false, true, false], vec![false, false, true], vec![false; 3]]).unwrap();
        let s = from_bool_matrices(&[g], 100).unwrap();
        assert_eq!(s.size(), 3);
        let zero = 2;
        assert!((0..3).all(|a| s.mul(a, zero) == zero && s.mul(zero, a) == zero));
    }

    #[test]
    fn rotation_collapses_to_cyclic_group() {
        let th = TAU / 5.0;
        let r = Matrix::from_real_rows(&[vec![th.cos(), -th.sin()], vec![th.sin(), th.cos()]]);
        let s = from_matrices(&[r], 1e-9, 100).unwrap();
        assert_eq!(s.size(), 5);
        let e = (0..5).find(|&a| s.mul(a, a) == a).unwrap();
        assert_eq!(s.words().unwrap()[e].len(), 5);
    }

    #[test]
    fn cap_and_associativity_errors() {
        let c = t(&[1, 2, 3, 4, 5, 6, 0]);
        assert_eq!(from_transformations(&[c], 5).unwrap_err(), Error::SemigroupCapExceeded { cap: 5 });
        // 0·(1·1) = 0·0 = 1 but (0·1)·1 = 0·1 = 0
        assert!(matches!(FiniteSemigroup::from_cayley(vec![vec![1, 0], vec![0, 0]]), Err(Error::NotAssociative { .. })));
    }

    #[test]
    fn coarse_collapse_detected() {
        let th = 0.5f64;
        let r = Matrix::from_real_rows(&[vec![th.cos(), -th.sin()], vec![th.sin(), th.cos()]]);
        let p = Matrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let err = from_matrices(&[r.clone(), p.clone()], 0.3, 1000);
        assert!(matches!(err, Err(Error::CollapseTooCoarse { .. })), "{err:?}");
        let quarter = Matrix::from_real_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
        assert!(from_matrices(&[quarter, p], 1e-9, 1000).is_ok());
    }

    #[test]
    fn cayley_json_roundtrip() {
        let s = left_zero(3);
        let j = serde_json::to_string(&s.to_json()).unwrap();
        let back: CayleyJson = serde_json::from_str(&j).unwrap();
        assert_eq!(FiniteSemigroup::from_json(&back).unwrap().cayley(), s.cayley());
    }
}
