//! Seeded verification battery over the fixture families.
//!
//! Each criterion runs a family of fixtures and folds the per-fixture check
//! blocks into one block: residuals become ratios to their thresholds (judged
//! against 1), zero-threshold counts stay counts (judged against 0), and
//! failing fixtures are listed in the certificates.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fixtures::{build, spec_by_name, Family, FixtureSpec};
use crate::ip::{finite_sums, find_fs_sequence_with, verify_ip_recurrence};
use crate::jdlg::{decompose, verify_invariance, verify_stability, verify_unimodular_eigenvectors};
use crate::koehler::{
    commutation_report, inverse_on_rev, minimal_idempotent_dynamical_with, minimal_idempotent_spectral, orbit_closure_with,
    DEFAULT_NET_CAP,
};
use crate::lattice::peripheral::circular_distance;
use crate::lattice::{
    check_cyclicity, frobenius_oracle, induced_lattice_ops, markov_power_mechanism, peripheral_spectrum_default,
    verify_lattice_isomorphism, verify_positive_projection, CompositionOperator, ConeOrder,
};
use crate::parallel::Execution;
use crate::report::{CheckBlock, Status};
use crate::semigroup::{
    center, from_transformations, idempotents, left_zero, cyclic_group, minidem_correspondence, minimal_ideals, rees_checks,
    Transformation,
};

pub const DYNAMICAL_HORIZON: usize = 360;
pub const INVERSE_HORIZON: usize = 2520;
pub const STABILITY_HORIZON: usize = 1000;
pub const CLOSURE_EPSILON: f64 = 1e-3;
pub const IP_HORIZON: usize = 1000;
pub const IP_EPSILON: f64 = 1e-6;
pub const IP_WITNESS_LEN: usize = 4;
pub const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct BatteryConfig {
    pub seed: u64,
    /// Fixtures per family for the operator criteria.
    pub count: usize,
    /// Fixtures for the cyclicity criterion.
    pub cyclicity_count: usize,
    pub exec: Execution,
}

impl BatteryConfig {
    pub fn new(seed: u64, count: usize) -> Self {
        Self { seed, count, cyclicity_count: 10 * count, exec: Execution::default() }
    }
}

struct Outcome {
    label: String,
    result: Result<Vec<CheckBlock>>,
}

fn fold(name: &str, outcomes: Vec<Outcome>) -> CheckBlock {
    let mut ratios: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut errors = Vec::new();
    for o in &outcomes {
        match &o.result {
            Err(e) => errors.push(json!({ "fixture": o.label, "error": e.to_string() })),
            Ok(blocks) => {
                let mut violated = Vec::new();
                for b in blocks {
                    for (k, v) in &b.residuals {
                        let t = b.thresholds[k];
                        let (value, limit) = if t > 0.0 { (v / t, 1.0) } else { (*v, 0.0) };
                        let slot = ratios.entry(format!("{}.{}", b.name, k)).or_insert((0.0, limit));
                        if !(value <= slot.0) {
                            slot.0 = if value.is_nan() { f64::INFINITY } else { value.max(slot.0) };
                        }
                    }
                    if b.status == Status::Fail {
                        violated.extend(b.violations().into_iter().map(|k| format!("{}.{}", b.name, k)));
                    }
                }
                if !violated.is_empty() {
                    failures.push(json!({ "fixture": o.label, "violations": violated }));
                }
            }
        }
    }
    let mut block = CheckBlock::new(name);
    for (k, (v, limit)) in ratios {
        block = block.residual(k, v, limit);
    }
    block
        .residual("errors", errors.len() as f64, 0.0)
        .certificates(json!({ "fixtures": outcomes.len(), "failures": failures, "errors": errors }))
}

fn label(spec: &FixtureSpec) -> String {
    format!("{}#{}", spec.name, spec.seed)
}

fn run_family<F>(cfg: &BatteryConfig, family: &str, base: u64, count: usize, check: F) -> Vec<Outcome>
where
    F: Fn(&crate::fixtures::Fixture) -> Result<Vec<CheckBlock>> + Sync + Send,
{
    cfg.exec.map_range(count, |i| {
        let spec = spec_by_name(family, base + i as u64).expect("catalog name");
        Outcome { label: label(&spec), result: build(&spec).and_then(|f| check(&f)) }
    })
}

/// Spectral and dynamical idempotents agree within `1e-6·n`.
pub fn idempotent_cross_oracle(cfg: &BatteryConfig) -> CheckBlock {
    let outcomes = run_family(cfg, "random-power-bounded", cfg.seed, cfg.count, |f| {
        let op = &f.operator;
        let ps = minimal_idempotent_spectral(op)?;
        let pd = minimal_idempotent_dynamical_with(op, DYNAMICAL_HORIZON, Execution::Sequential)?;
        let n = op.dim() as f64;
        Ok(vec![CheckBlock::new("idempotents")
            .residual("spectral_vs_dynamical", ps.p.dist(&pd.p), 1e-6 * n)
            .condition("rev_dim_matches_fixture", rank_of(&ps.p) == f.expected.rev_dim)])
    });
    fold("battery.1_idempotent_cross_oracle", outcomes)
}

fn rank_of(p: &crate::linalg::Matrix) -> usize {
    crate::jdlg::projection_bases(p, 1e-9).map(|(im, _)| im.len()).unwrap_or(usize::MAX)
}

/// Projection, invariance, inverse, eigenvector and stability properties of
/// the decomposition.
pub fn decomposition_suite(cfg: &BatteryConfig) -> CheckBlock {
    let outcomes = run_family(cfg, "random-power-bounded", cfg.seed, cfg.count, |f| {
        let op = &f.operator;
        let t = op.matrix();
        let tn = t.frobenius_norm();
        let ps = minimal_idempotent_spectral(op)?;
        let p = &ps.p;
        let d = decompose(op, &ps)?;
        let closure = orbit_closure_with(op, DYNAMICAL_HORIZON, CLOSURE_EPSILON, DEFAULT_NET_CAP, Execution::Sequential)?;
        Ok(vec![
            CheckBlock::new("projection")
                .residual("idempotency", p.matmul(p).dist(p), 1e-8)
                .residual("commutation", p.commutator_norm(t), 1e-8 * tn)
                .residual("rev_inverse", d.inverse_residual, 1e-8),
            verify_invariance(&d, op, Some(&closure)),
            commutation_report(&closure),
            verify_unimodular_eigenvectors(&d, op)?,
            verify_stability(&d, op, STABILITY_HORIZON, f.spec.seed)?,
        ])
    });
    fold("battery.2_decomposition", outcomes)
}

/// Positive projection, induced lattice axioms, lattice isomorphism and
/// positive inverse on nonnegative fixtures.
pub fn positivity_suite(cfg: &BatteryConfig) -> CheckBlock {
    let outcomes = run_family(cfg, "random-nonnegative", cfg.seed, cfg.count, |f| {
        let op = &f.operator;
        let order = ConeOrder::new(op.dim(), POSITIVITY_TOL)?;
        let ps = minimal_idempotent_spectral(op)?;
        let inv = inverse_on_rev(op, &ps, INVERSE_HORIZON)?;
        let lattice = induced_lattice_ops(&ps, &order)?;
        Ok(vec![
            verify_positive_projection(op, &ps, &order)?,
            lattice.verify_axioms(100, f.spec.seed),
            verify_lattice_isomorphism(op, &ps, &order, Some(&inv), 100, f.spec.seed)?,
        ])
    });
    fold("battery.3_positivity", outcomes)
}

/// Cyclic peripheral spectrum with `K_max = n`, equal to the combinatorial
/// prediction and to the construction metadata.
pub fn cyclicity_suite(cfg: &BatteryConfig) -> CheckBlock {
    let outcomes = run_family(cfg, "random-nonnegative", cfg.seed, cfg.cyclicity_count, |f| {
        let op = &f.operator;
        let ps = peripheral_spectrum_default(op)?;
        let cyc = check_cyclicity(&ps, op.dim());
        let oracle = frobenius_oracle(op)?;
        let same = |a: &[f64], b: &[f64]| {
            a.iter().all(|x| b.iter().any(|y| circular_distance(*x, *y) <= ps.tol_angle))
                && b.iter().all(|y| a.iter().any(|x| circular_distance(*x, *y) <= ps.tol_angle))
        };
        let expected = f.expected.peripheral_angles.clone().unwrap_or_default();
        Ok(vec![CheckBlock::new("cyclicity")
            .condition("cyclic", cyc.cyclic)
            .condition("oracle_equal", same(&ps.angles, &oracle.spectrum.angles))
            .condition("construction_equal", same(&ps.angles, &expected))
            .residual("radius_gap", (ps.radius - 1.0).abs(), 1e-8)])
    });
    fold("battery.4_cyclicity", outcomes)
}

/// All self-maps of `{0..m-1}` for `m ≤ 3`, and 200 sampled for `m = 4`.
pub fn composition_maps(seed: u64) -> Vec<Vec<usize>> {
    let mut maps = Vec::new();
    for m in 1..=3usize {
        let total = m.pow(m as u32);
        for code in 0..total {
            let mut c = code;
            maps.push(
                (0..m)
                    .map(|_| {
                        let d = c % m;
                        c /= m;
                        d
                    })
                    .collect(),
            );
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        maps.push((0..4).map(|_| rng.gen_range(0..4)).collect());
    }
    maps
}

pub fn markov_suite(cfg: &BatteryConfig) -> CheckBlock {
    let maps = composition_maps(cfg.seed);
    let outcomes = cfg.exec.map_slice(&maps, |map| Outcome {
        label: format!("{map:?}"),
        result: CompositionOperator::new(map.clone()).and_then(|c| {
            let b = markov_power_mechanism(&c, map.len(), cfg.seed)?;
            Ok(vec![b])
        }),
    });
    fold("battery.5_markov", outcomes)
}

/// T₃ from a 3-cycle, a transposition and a rank-2 idempotent, plus the
/// literal constant-map generator set, left-zero and group edge cases.
pub fn semigroup_suite() -> CheckBlock {
    let t = |v: &[usize]| Transformation::new(v.to_vec()).expect("valid map");
    let mut blocks = Vec::new();
    let mut certs = serde_json::Map::new();
    let t3 = from_transformations(&[t(&[1, 2, 0]), t(&[1, 0, 2]), t(&[1, 1, 2])], 100);
    let constant = from_transformations(&[t(&[1, 2, 0]), t(&[1, 0, 2]), t(&[0, 0, 0])], 100);
    match (t3, constant) {
        (Ok(s), Ok(c)) => {
            let idem = idempotents(&s).len();
            blocks.push(
                CheckBlock::new("t3")
                    .condition("size_27", s.size() == 27)
                    .condition("idempotents_10", idem == 10)
                    .condition("constant_generator_gives_9", c.size() == 9),
            );
            blocks.push(rees_checks(&s));
            match minidem_correspondence(&s) {
                Ok(b) => blocks.push(b),
                Err(e) => blocks.push(CheckBlock::new("t3.correspondence").condition(e.to_string(), false)),
            }
            certs.insert("t3_size".into(), json!(s.size()));
            certs.insert("t3_idempotents".into(), json!(idem));
            certs.insert("constant_generated_size".into(), json!(c.size()));
        }
        (a, b) => {
            let e = a.err().or(b.err()).map(|e| e.to_string()).unwrap_or_default();
            blocks.push(CheckBlock::new("t3").condition(format!("generation: {e}"), false));
        }
    }
    let lz = left_zero(2);
    let (l, r) = minimal_ideals(&lz);
    blocks.push(
        CheckBlock::new("left_zero")
            .condition("idempotents_all", idempotents(&lz) == vec![0, 1])
            .condition("one_minimal_left_ideal", l.iter().filter(|x| x.minimal).count() == 1)
            .condition("two_minimal_right_ideals", r.iter().filter(|x| x.minimal).count() == 2)
            .condition("empty_center", center(&lz).is_empty()),
    );
    blocks.push(rees_checks(&lz));
    let g = cyclic_group(5);
    blocks.push(
        CheckBlock::new("group")
            .condition("single_idempotent", idempotents(&g) == vec![0])
            .condition("abelian_center", center(&g).len() == 5),
    );
    blocks.push(rees_checks(&g));
    let mut out = fold(
        "battery.6_semigroup",
        vec![Outcome { label: "semigroup".into(), result: Ok(blocks) }],
    );
    if let serde_json::Value::Object(m) = &mut out.certificates {
        m.extend(certs);
    }
    out
}

/// FS round trips, exact return sets for root-of-unity eigenvectors and
/// length-4 witnesses on rational-angle fixtures.
pub fn ip_suite(cfg: &BatteryConfig) -> CheckBlock {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let witnesses: Vec<Vec<u64>> = (0..100)
        .map(|_| {
            let m = rng.gen_range(1..=5);
            let mut xs = BTreeSet::new();
            while xs.len() < m {
                xs.insert(rng.gen_range(1..=400u64));
            }
            xs.into_iter().collect()
        })
        .collect();
    let mut outcomes = cfg.exec.map_slice(&witnesses, |w| Outcome {
        label: format!("fs{w:?}"),
        result: (|| {
            let fs = finite_sums(w)?;
            let bound = *fs.iter().next_back().expect("nonempty");
            let found = find_fs_sequence_with(&fs, w.len(), bound, Execution::Sequential)?
                .ok_or_else(|| Error::InternalInconsistency("round trip found no witness".into()))?;
            let inside = found.fs.iter().all(|x| fs.contains(x));
            Ok(vec![CheckBlock::new("fs_roundtrip").condition("fs_contained", inside)])
        })(),
    });

    let mut specs: Vec<FixtureSpec> = Vec::new();
    for k in 1..=12u64 {
        specs.push(FixtureSpec { name: "root-eigen".into(), seed: cfg.seed + k, family: Family::RootEigen { k } });
    }
    for k in 2..=6usize {
        specs.push(FixtureSpec { name: "cyclic-shift".into(), seed: cfg.seed, family: Family::CyclicShift { k } });
    }
    specs.push(spec_by_name("rotation-contraction", cfg.seed).expect("catalog name"));
    specs.push(spec_by_name("identity", cfg.seed).expect("catalog name"));
    for i in 0..cfg.count.min(20) as u64 {
        specs.push(spec_by_name("random-power-bounded", cfg.seed + i).expect("catalog name"));
    }
    outcomes.extend(cfg.exec.map_slice(&specs, |spec| Outcome {
        label: label(spec),
        result: build(spec).and_then(|f| {
            let ps = minimal_idempotent_spectral(&f.operator)?;
            let d = decompose(&f.operator, &ps)?;
            Ok(vec![verify_ip_recurrence(&f.operator, &d, IP_EPSILON, IP_HORIZON, IP_WITNESS_LEN)?])
        }),
    }));
    fold("battery.7_ip", outcomes)
}

/// All battery criteria, sorted by block name.
pub fn run_battery(cfg: &BatteryConfig) -> Vec<CheckBlock> {
    let mut blocks = vec![
        idempotent_cross_oracle(cfg),
        decomposition_suite(cfg),
        positivity_suite(cfg),
        cyclicity_suite(cfg),
        markov_suite(cfg),
        semigroup_suite(),
        ip_suite(cfg),
    ];
    blocks.sort_by(|a, b| a.name.cmp(&b.name));
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_map_counts() {
        let maps = composition_maps(1);
        assert_eq!(maps.len(), 1 + 4 + 27 + 200);
        assert_eq!(maps.iter().filter(|m| m.len() == 3).count(), 27);
    }

    #[test]
    fn fold_reports_ratios_and_errors() {
        let ok = Outcome { label: "a".into(), result: Ok(vec![CheckBlock::new("x").residual("r", 0.5, 2.0)]) };
        let bad = Outcome { label: "b".into(), result: Err(Error::Infeasible("no".into())) };
        let b = fold("f", vec![ok, bad]);
        assert_eq!(b.residuals["x.r"], 0.25);
        assert_eq!(b.residuals["errors"], 1.0);
        assert_eq!(b.status, Status::Fail);
    }

    #[test]
    fn small_battery_passes() {
        let cfg = BatteryConfig::new(3, 2);
        for b in run_battery(&cfg) {
            assert!(b.passed(), "{}", serde_json::to_string_pretty(&b).unwrap());
        }
    }
}
