//! Seeded operator instances with their expected spectral metadata.

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::peripheral::cluster_angles;
use crate::linalg::matrix::{ONE, ZERO};
use crate::linalg::power::perron_root;
use crate::linalg::{inverse, svd, Matrix, MatrixJson, OperatorMatrix, C64, DEFAULT_TOL};

pub const MAX_COND: f64 = 50.0;
pub const COND_ATTEMPTS: usize = 100;
/// Largest order of a root-of-unity eigenvalue in random power-bounded
/// fixtures; their minimal returns divide `lcm(1..=6) = 60`.
pub const MAX_RANDOM_ORDER: u64 = 6;
pub const MAX_CONTRACTION: f64 = 0.85;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    CyclicShift { k: usize },
    NilpotentShift { k: usize },
    /// Rotations by `turns · 2π` followed by scalar contractions.
    RotationContraction { turns: Vec<f64>, rates: Vec<f64> },
    Identity { n: usize },
    /// `S · diag(e^{2πi/k}, 0.5) · S⁻¹`.
    RootEigen { k: u64 },
    RandomPowerBounded { n: Option<usize> },
    RandomNonnegative { n: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub name: String,
    pub seed: u64,
    #[serde(flatten)]
    pub family: Family,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub power_bounded: bool,
    pub positive: bool,
    /// Peripheral angles in `[0, 2π)` after normalizing `r = 1`, when known.
    pub peripheral_angles: Option<Vec<f64>>,
    pub rev_dim: usize,
    /// Orders of root-of-unity eigenvalues (with multiplicity), when all
    /// unimodular eigenvalues are roots of unity.
    pub root_orders: Option<Vec<u64>>,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub spec: FixtureSpec,
    pub operator: OperatorMatrix,
    pub expected: Expected,
}

/// Serialized fixture, as stored next to the tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureRecord {
    pub version: u32,
    pub spec: FixtureSpec,
    pub matrix: MatrixJson,
    pub expected: Expected,
}

impl Fixture {
    pub fn record(&self) -> FixtureRecord {
        FixtureRecord { version: 1, spec: self.spec.clone(), matrix: self.operator.to_json(), expected: self.expected.clone() }
    }

    /// The expected rev-dimension equals the number of unimodular
    /// eigenvalues the construction put in.
    pub fn is_consistent(&self) -> bool {
        let e = &self.expected;
        let roots_ok = e.root_orders.as_ref().is_none_or(|o| o.len() == e.rev_dim);
        let pos_ok = !e.positive || self.operator.matrix().as_slice().iter().all(|z| z.re >= 0.0 && z.im == 0.0);
        roots_ok && pos_ok && e.rev_dim <= self.operator.dim()
    }
}

pub const CATALOG: &[&str] = &[
    "cyclic-shift",
    "identity",
    "mixed",
    "nilpotent-shift",
    "random-nonnegative",
    "random-power-bounded",
    "root-eigen",
    "rotation-contraction",
];

/// Default spec for a catalog name.
pub fn spec_by_name(name: &str, seed: u64) -> Result<FixtureSpec> {
    let family = match name {
        "cyclic-shift" => Family::CyclicShift { k: 5 },
        "nilpotent-shift" => Family::NilpotentShift { k: 4 },
        "rotation-contraction" => Family::RotationContraction { turns: vec![0.2], rates: vec![0.5] },
        "identity" => Family::Identity { n: 3 },
        "root-eigen" => Family::RootEigen { k: 7 },
        "random-power-bounded" | "mixed" => Family::RandomPowerBounded { n: None },
        "random-nonnegative" => Family::RandomNonnegative { n: None },
        other => return Err(Error::InvalidInput(format!("unknown fixture {other:?}; known: {}", CATALOG.join(", ")))),
    };
    Ok(FixtureSpec { name: name.to_string(), seed, family })
}

pub fn build(spec: &FixtureSpec) -> Result<Fixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (matrix, expected) = match &spec.family {
        Family::CyclicShift { k } => cyclic_shift(*k)?,
        Family::NilpotentShift { k } => nilpotent_shift(*k)?,
        Family::RotationContraction { turns, rates } => rotation_contraction(turns, rates)?,
        Family::Identity { n } => {
            check_dim(*n)?;
            let e = Expected {
                power_bounded: true,
                positive: true,
                peripheral_angles: Some(vec![0.0]),
                rev_dim: *n,
                root_orders: Some(vec![1; *n]),
            };
            (Matrix::identity(*n), e)
        }
        Family::RootEigen { k } => root_eigen(*k, &mut rng)?,
        Family::RandomPowerBounded { n } => random_power_bounded(*n, &mut rng)?,
        Family::RandomNonnegative { n } => random_nonnegative(*n, &mut rng)?,
    };
    Ok(Fixture { spec: spec.clone(), operator: OperatorMatrix::new(matrix, DEFAULT_TOL)?, expected })
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidInput("fixture dimension must be positive".into()))
    } else {
        Ok(())
    }
}

fn roots_angles(h: usize) -> Vec<f64> {
    (0..h).map(|j| TAU * j as f64 / h as f64).collect()
}

fn cyclic_shift(k: usize) -> Result<(Matrix, Expected)> {
    check_dim(k)?;
    let m = Matrix::from_fn(k, k, |i, j| if j == (i + 1) % k { ONE } else { ZERO });
    let orders = (0..k as u64).map(|j| k as u64 / gcd(j, k as u64)).collect();
    let e = Expected {
        power_bounded: true,
        positive: true,
        peripheral_angles: Some(roots_angles(k)),
        rev_dim: k,
        root_orders: Some(orders),
    };
    Ok((m, e))
}

fn nilpotent_shift(k: usize) -> Result<(Matrix, Expected)> {
    check_dim(k)?;
    let m = Matrix::from_fn(k, k, |i, j| if j == i + 1 { ONE } else { ZERO });
    let e = Expected { power_bounded: true, positive: true, peripheral_angles: Some(Vec::new()), rev_dim: 0, root_orders: Some(Vec::new()) };
    Ok((m, e))
}

fn rotation_contraction(turns: &[f64], rates: &[f64]) -> Result<(Matrix, Expected)> {
    if rates.iter().any(|r| !(0.0..1.0).contains(r)) {
        return Err(Error::InvalidInput("contraction rates must lie in [0, 1)".into()));
    }
    let n = 2 * turns.len() + rates.len();
    check_dim(n)?;
    let mut m = Matrix::zeros(n, n);
    let mut orders = Some(Vec::new());
    for (b, t) in turns.iter().enumerate() {
        let (c, s) = ((TAU * t).cos(), (TAU * t).sin());
        let i = 2 * b;
        m[(i, i)] = c.into();
        m[(i, i + 1)] = (-s).into();
        m[(i + 1, i)] = s.into();
        m[(i + 1, i + 1)] = c.into();
        let order = (1..=crate::ip::MAX_ROOT_ORDER).find(|q| ((t * *q as f64) - (t * *q as f64).round()).abs() < 1e-12);
        match (order, orders.as_mut()) {
            (Some(q), Some(o)) => o.extend([q, q]),
            _ => orders = None,
        }
    }
    for (j, r) in rates.iter().enumerate() {
        let i = 2 * turns.len() + j;
        m[(i, i)] = (*r).into();
    }
    let e = Expected { power_bounded: true, positive: false, peripheral_angles: None, rev_dim: 2 * turns.len(), root_orders: orders };
    Ok((m, e))
}

fn uniform_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn condition_number(s: &Matrix) -> f64 {
    let d = svd(s);
    let lo = *d.sigma.last().unwrap_or(&0.0);
    if lo == 0.0 {
        f64::INFINITY
    } else {
        d.sigma[0] / lo
    }
}

/// `S = I + 0.3 G / √n` with `cond(S) ≤ max_cond`, or `Infeasible`.
pub fn random_similarity(n: usize, max_cond: f64, rng: &mut ChaCha8Rng) -> Result<(Matrix, Matrix)> {
    let scale = 0.3 / (n as f64).sqrt();
    for _ in 0..COND_ATTEMPTS {
        let s = Matrix::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO } + uniform_c(rng) * scale);
        if condition_number(&s) <= max_cond {
            if let Ok(inv) = inverse(&s) {
                return Ok((s, inv));
            }
        }
    }
    Err(Error::Infeasible(format!("no similarity with cond ≤ {max_cond} in {COND_ATTEMPTS} attempts")))
}

fn root_eigen(k: u64, rng: &mut ChaCha8Rng) -> Result<(Matrix, Expected)> {
    if k == 0 || k > crate::ip::MAX_ROOT_ORDER {
        return Err(Error::InvalidInput(format!("root order must lie in 1..={}", crate::ip::MAX_ROOT_ORDER)));
    }
    let d = Matrix::diag(&[C64::from_polar(1.0, TAU / k as f64), C64::new(0.5, 0.0)]);
    let (s, si) = random_similarity(2, 10.0, rng)?;
    let e = Expected { power_bounded: true, positive: false, peripheral_angles: None, rev_dim: 1, root_orders: Some(vec![k]) };
    Ok((s.matmul(&d).matmul(&si), e))
}

/// `S D S⁻¹` with `D` = roots of unity of order ≤ 6 ⊕ contractive part of
/// modulus ≤ 0.85, possibly containing a 2×2 Jordan block.
fn random_power_bounded(n: Option<usize>, rng: &mut ChaCha8Rng) -> Result<(Matrix, Expected)> {
    let n = n.unwrap_or_else(|| rng.gen_range(2..=12));
    check_dim(n)?;
    let unimodular = if n == 1 { 1 } else { rng.gen_range(1..n) };
    let mut d = Matrix::zeros(n, n);
    let mut orders = Vec::with_capacity(unimodular);
    for i in 0..unimodular {
        let q = rng.gen_range(1..=MAX_RANDOM_ORDER);
        let p = rng.gen_range(0..q);
        orders.push(q / gcd(p, q));
        d[(i, i)] = C64::from_polar(1.0, TAU * p as f64 / q as f64);
    }
    let mut i = unimodular;
    while i < n {
        let lam = C64::from_polar(rng.gen_range(0.0..MAX_CONTRACTION), rng.gen_range(0.0..TAU));
        d[(i, i)] = lam;
        if i + 1 < n && rng.gen_bool(0.3) {
            d[(i + 1, i + 1)] = lam;
            d[(i, i + 1)] = C64::new(0.5, 0.0);
            i += 2;
        } else {
            i += 1;
        }
    }
    let (s, si) = random_similarity(n, MAX_COND, rng)?;
    let e = Expected { power_bounded: true, positive: false, peripheral_angles: None, rev_dim: unimodular, root_orders: Some(orders) };
    Ok((s.matmul(&d).matmul(&si), e))
}

/// Irreducible block with period `h`: complete bipartite weights between
/// consecutive classes, scaled to Perron root `target`.
fn periodic_block(size: usize, h: usize, target: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let class: Vec<usize> = (0..size).map(|v| v % h).collect();
    let mut a = vec![vec![0.0; size]; size];
    for u in 0..size {
        for v in 0..size {
            if (class[u] + 1) % h == class[v] {
                a[u][v] = rng.gen_range(0.2..1.0);
            }
        }
    }
    let r = perron_root(&a);
    for row in &mut a {
        for x in row {
            *x *= target / r;
        }
    }
    a
}

/// Block upper-triangular nonnegative matrix under a random permutation.
/// Basic blocks are irreducible with Perron root 1 and period ≤ 4; the
/// others have Perron root in `[0.2, 0.8]` or are single transient vertices.
/// Couplings only run from basic to non-basic blocks or forward between
/// non-basic blocks, so no path joins two basic blocks.
fn random_nonnegative(n: Option<usize>, rng: &mut ChaCha8Rng) -> Result<(Matrix, Expected)> {
    let n = n.unwrap_or_else(|| rng.gen_range(1..=10));
    check_dim(n)?;
    struct Block {
        start: usize,
        size: usize,
        basic: bool,
    }
    let mut blocks: Vec<Block> = Vec::new();
    let mut a = vec![vec![0.0; n]; n];
    let mut periods = Vec::new();
    let mut at = 0;
    while at < n {
        let remaining = n - at;
        let basic = blocks.is_empty() || rng.gen_bool(0.4);
        let size = rng.gen_range(1..=remaining.min(4));
        let sub = if basic {
            let h = rng.gen_range(1..=size);
            periods.push(h);
            periodic_block(size, h, 1.0, rng)
        } else if size == 1 && rng.gen_bool(0.5) {
            vec![vec![0.0]]
        } else {
            let h = rng.gen_range(1..=size);
            let target = rng.gen_range(0.2..0.8);
            periodic_block(size, h, target, rng)
        };
        for i in 0..size {
            for j in 0..size {
                a[at + i][at + j] = sub[i][j];
            }
        }
        blocks.push(Block { start: at, size, basic });
        at += size;
    }
    for (bi, b) in blocks.iter().enumerate() {
        for c in blocks.iter().skip(bi + 1).filter(|c| !c.basic) {
            if !rng.gen_bool(0.5) {
                continue;
            }
            let u = b.start + rng.gen_range(0..b.size);
            let v = c.start + rng.gen_range(0..c.size);
            a[u][v] = rng.gen_range(0.05..0.5);
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let m = Matrix::from_fn(n, n, |i, j| C64::new(a[perm[i]][perm[j]], 0.0));
    let angles = cluster_angles(periods.iter().flat_map(|&h| roots_angles(h)), 1e-9);
    let rev_dim = periods.iter().sum();
    let orders = periods.iter().flat_map(|&h| (0..h as u64).map(move |j| h as u64 / gcd(j, h as u64))).collect();
    let e = Expected { power_bounded: true, positive: true, peripheral_angles: Some(angles), rev_dim, root_orders: Some(orders) };
    Ok((m, e))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Seeded batch of one family; fixture `i` uses seed `base + i`.
pub fn batch(name: &str, base_seed: u64, count: usize) -> Result<Vec<Fixture>> {
    (0..count).map(|i| build(&spec_by_name(name, base_seed + i as u64)?)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigen_decompose, is_power_bounded};

    #[test]
    fn cyclic_and_nilpotent_shifts() {
        let f = build(&spec_by_name("cyclic-shift", 0).unwrap()).unwrap();
        assert_eq!(f.expected.rev_dim, 5);
        assert!(f.is_consistent());
        let f = build(&spec_by_name("nilpotent-shift", 0).unwrap()).unwrap();
        assert_eq!(f.expected.rev_dim, 0);
        assert!(f.operator.matrix().pow(4).frobenius_norm() == 0.0);
    }

    #[test]
    fn builds_are_deterministic() {
        for name in CATALOG {
            let a = build(&spec_by_name(name, 9).unwrap()).unwrap();
            let b = build(&spec_by_name(name, 9).unwrap()).unwrap();
            assert_eq!(a.record(), b.record(), "{name}");
            assert!(a.is_consistent(), "{name}");
        }
        assert!(spec_by_name("nope", 0).is_err());
    }

    #[test]
    fn random_power_bounded_metadata_matches_spectrum() {
        for seed in 0..20 {
            let f = build(&spec_by_name("random-power-bounded", seed).unwrap()).unwrap();
            assert!(is_power_bounded(&f.operator).unwrap().power_bounded, "seed {seed}");
            let eig = eigen_decompose(&f.operator).unwrap();
            let unimodular: usize = eig
                .spectrum
                .eigenvalues
                .iter()
                .filter(|e| e.value.norm() > 1.0 - 1e-6)
                .map(|e| e.algebraic_multiplicity)
                .sum();
            assert_eq!(unimodular, f.expected.rev_dim, "seed {seed}");
        }
    }

    #[test]
    fn random_nonnegative_is_exactly_positive_with_unit_radius() {
        for seed in 0..50 {
            let f = build(&spec_by_name("random-nonnegative", seed).unwrap()).unwrap();
            assert!(f.is_consistent(), "seed {seed}");
            let eig = eigen_decompose(&f.operator).unwrap();
            assert!((eig.spectrum.spectral_radius - 1.0).abs() < 1e-8, "seed {seed}: {}", eig.spectrum.spectral_radius);
            assert!(is_power_bounded(&f.operator).unwrap().power_bounded, "seed {seed}");
        }
    }

    #[test]
    fn infeasible_condition_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(random_similarity(4, 1.0, &mut rng), Err(Error::Infeasible(_))));
    }
}
