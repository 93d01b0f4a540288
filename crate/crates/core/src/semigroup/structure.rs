//! Idempotents, their order, principal ideals, Rees checks and the center.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::json;

use super::FiniteSemigroup;
use crate::report::CheckBlock;

/// `{a : a·a = a}`, cross-checked against the idempotents met on the power
/// cycles of all elements.
pub fn idempotents(s: &FiniteSemigroup) -> Vec<usize> {
    let direct: Vec<usize> = (0..s.size()).filter(|&a| s.mul(a, a) == a).collect();
    debug_assert_eq!(direct, power_cycle_idempotents(s));
    direct
}

/// For each `a`, the unique idempotent on the cycle of `a, a², …`.
pub fn power_cycle_idempotents(s: &FiniteSemigroup) -> Vec<usize> {
    let mut found = BTreeSet::new();
    for a in 0..s.size() {
        let mut seen = vec![usize::MAX; s.size()];
        let mut x = a;
        let mut k = 1;
        while seen[x] == usize::MAX {
            seen[x] = k;
            x = s.mul(x, a);
            k += 1;
        }
        let start = x;
        let mut cycle = vec![start];
        let mut y = s.mul(start, a);
        while y != start {
            cycle.push(y);
            y = s.mul(y, a);
        }
        let idem: Vec<usize> = cycle.into_iter().filter(|&c| s.mul(c, c) == c).collect();
        assert_eq!(idem.len(), 1, "power cycle of {a} must contain exactly one idempotent");
        found.insert(idem[0]);
    }
    found.into_iter().collect()
}

/// Pairs `(e, f)` of idempotents with `e = ef = fe`.
pub fn idempotent_order(s: &FiniteSemigroup) -> Vec<(usize, usize)> {
    let idem = idempotents(s);
    let mut out = Vec::new();
    for &e in &idem {
        for &f in &idem {
            if s.mul(e, f) == e && s.mul(f, e) == e {
                out.push((e, f));
            }
        }
    }
    out
}

/// Idempotents with nothing strictly below them.
pub fn minimal_idempotents(s: &FiniteSemigroup) -> Vec<usize> {
    let order = idempotent_order(s);
    idempotents(s).into_iter().filter(|&e| !order.iter().any(|&(p, q)| q == e && p != e)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IdealKind {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealRecord {
    pub kind: IdealKind,
    pub members: Vec<usize>,
    pub minimal: bool,
}

/// `S¹a` for every `a`.
pub fn left_ideal(s: &FiniteSemigroup, a: usize) -> Vec<usize> {
    let set: BTreeSet<usize> = (0..s.size()).map(|x| s.mul(x, a)).chain([a]).collect();
    set.into_iter().collect()
}

/// `aS¹` for every `a`.
pub fn right_ideal(s: &FiniteSemigroup, a: usize) -> Vec<usize> {
    let set: BTreeSet<usize> = (0..s.size()).map(|x| s.mul(a, x)).chain([a]).collect();
    set.into_iter().collect()
}

fn principal(s: &FiniteSemigroup, kind: IdealKind) -> Vec<IdealRecord> {
    let mut sets: Vec<Vec<usize>> = (0..s.size())
        .map(|a| match kind {
            IdealKind::Left => left_ideal(s, a),
            IdealKind::Right => right_ideal(s, a),
        })
        .collect();
    sets.sort();
    sets.dedup();
    let subset = |a: &Vec<usize>, b: &Vec<usize>| a.iter().all(|x| b.binary_search(x).is_ok());
    let minimal: Vec<bool> = sets.iter().map(|i| !sets.iter().any(|j| j.len() < i.len() && subset(j, i))).collect();
    sets.into_iter().zip(minimal).map(|(members, minimal)| IdealRecord { kind, members, minimal }).collect()
}

/// All distinct principal left and right ideals, minimal ones flagged.
pub fn minimal_ideals(s: &FiniteSemigroup) -> (Vec<IdealRecord>, Vec<IdealRecord>) {
    (principal(s, IdealKind::Left), principal(s, IdealKind::Right))
}

fn minimal_sets(records: &[IdealRecord]) -> Vec<Vec<usize>> {
    records.iter().filter(|r| r.minimal).map(|r| r.members.clone()).collect()
}

/// Whether `set` is a subgroup of `s`: closed, exactly one idempotent, and
/// every element invertible with respect to it.
pub fn is_group(s: &FiniteSemigroup, set: &[usize]) -> bool {
    let member = |x: usize| set.binary_search(&x).is_ok();
    if set.is_empty() || !set.iter().all(|&a| set.iter().all(|&b| member(s.mul(a, b)))) {
        return false;
    }
    let idem: Vec<usize> = set.iter().copied().filter(|&a| s.mul(a, a) == a).collect();
    let [e] = idem[..] else { return false };
    set.iter().all(|&a| s.mul(e, a) == a && s.mul(a, e) == a && set.iter().any(|&b| s.mul(a, b) == e && s.mul(b, a) == e))
}

pub fn rees_checks(s: &FiniteSemigroup) -> CheckBlock {
    let (left, right) = minimal_ideals(s);
    let (ml, mr) = (minimal_sets(&left), minimal_sets(&right));
    let mins = minimal_idempotents(s);
    let mut bad_ese = Vec::new();
    let mut bad_principal = Vec::new();
    for &e in &mins {
        let ese: BTreeSet<usize> = (0..s.size()).map(|x| s.mul(s.mul(e, x), e)).collect();
        let ese: Vec<usize> = ese.into_iter().collect();
        if !is_group(s, &ese) {
            bad_ese.push(e);
        }
        let es: BTreeSet<usize> = (0..s.size()).map(|x| s.mul(e, x)).collect();
        let se: BTreeSet<usize> = (0..s.size()).map(|x| s.mul(x, e)).collect();
        let es: Vec<usize> = es.into_iter().collect();
        let se: Vec<usize> = se.into_iter().collect();
        if !mr.contains(&es) || !ml.contains(&se) {
            bad_principal.push(e);
        }
    }
    let mut bad_cells = Vec::new();
    for (i, l) in ml.iter().enumerate() {
        for (j, r) in mr.iter().enumerate() {
            let cell: Vec<usize> = l.iter().copied().filter(|x| r.binary_search(x).is_ok()).collect();
            let idem = cell.iter().filter(|&&a| s.mul(a, a) == a).count();
            if idem != 1 || !is_group(s, &cell) {
                bad_cells.push((i, j));
            }
        }
    }
    CheckBlock::new("semigroup.rees")
        .condition("has_idempotent", !idempotents(s).is_empty())
        .residual("ese_not_group", bad_ese.len() as f64, 0.0)
        .residual("principal_mismatch", bad_principal.len() as f64, 0.0)
        .residual("cells_not_group", bad_cells.len() as f64, 0.0)
        .certificates(json!({
            "minimal_idempotents": mins,
            "minimal_left_ideals": ml,
            "minimal_right_ideals": mr,
            "ese_failures": bad_ese,
            "cell_failures": bad_cells,
        }))
}

/// Algebraic center. In a finite discrete semigroup the generators are
/// dense, so the topological center is the centralizer of the generators;
/// both sets are computed and must agree.
pub fn center(s: &FiniteSemigroup) -> Vec<usize> {
    let commutes = |z: usize, a: usize| s.mul(z, a) == s.mul(a, z);
    let full: Vec<usize> = (0..s.size()).filter(|&z| (0..s.size()).all(|a| commutes(z, a))).collect();
    let by_gens: Vec<usize> = (0..s.size()).filter(|&z| s.generators().iter().all(|&g| commutes(z, g))).collect();
    assert_eq!(full, by_gens, "center differs from centralizer of generators");
    full
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{cyclic_group, from_transformations, left_zero, Transformation};

    fn t(v: &[usize]) -> Transformation {
        Transformation::new(v.to_vec()).unwrap()
    }

    fn find(s: &FiniteSemigroup, els: &[Transformation], x: &[usize]) -> usize {
        let _ = s;
        els.iter().position(|e| e.0 == x).unwrap()
    }

    fn t2() -> (FiniteSemigroup, Vec<Transformation>) {
        let s = from_transformations(&[t(&[1, 0]), t(&[0, 0])], 100).unwrap();
        let Some(crate::semigroup::ElementMeta::Transformations(els)) = s.meta().cloned() else { panic!() };
        (s, els)
    }

    #[test]
    fn group_edge_case() {
        let g = cyclic_group(4);
        assert_eq!(idempotents(&g), vec![0]);
        assert_eq!(idempotent_order(&g), vec![(0, 0)]);
        let (l, r) = minimal_ideals(&g);
        assert_eq!(l.len(), 1);
        assert_eq!(r.len(), 1);
        assert_eq!(l[0].members, vec![0, 1, 2, 3]);
        assert!(rees_checks(&g).passed());
        assert_eq!(center(&g), vec![0, 1, 2, 3]);
    }

    #[test]
    fn left_zero_edge_case() {
        let s = left_zero(2);
        assert_eq!(idempotents(&s), vec![0, 1]);
        let (l, r) = minimal_ideals(&s);
        // S¹a = S for every a, a·S¹ = {a}
        assert_eq!(l, vec![IdealRecord { kind: IdealKind::Left, members: vec![0, 1], minimal: true }]);
        assert_eq!(r.iter().map(|x| x.members.clone()).collect::<Vec<_>>(), vec![vec![0], vec![1]]);
        assert!(r.iter().all(|x| x.minimal));
        let rees = rees_checks(&s);
        assert!(rees.passed());
        assert!(center(&s).is_empty());
    }

    #[test]
    fn t2_order_ideals_center() {
        let (s, els) = t2();
        let id = find(&s, &els, &[0, 1]);
        let c0 = find(&s, &els, &[0, 0]);
        let c1 = find(&s, &els, &[1, 1]);
        let order = idempotent_order(&s);
        assert!(order.contains(&(c0, id)) && order.contains(&(c1, id)));
        assert!(!order.contains(&(c0, c1)) && !order.contains(&(c1, c0)));
        let mut mins = minimal_idempotents(&s);
        mins.sort();
        let mut expect = vec![c0, c1];
        expect.sort();
        assert_eq!(mins, expect);
        let (l, r) = minimal_ideals(&s);
        let ml = minimal_sets(&l);
        let mr = minimal_sets(&r);
        assert_eq!(ml, vec![expect.clone()]);
        assert_eq!(mr.len(), 2);
        let rees = rees_checks(&s);
        assert!(rees.passed());
        let ese: BTreeSet<usize> = (0..4).map(|x| s.mul(s.mul(c0, x), c0)).collect();
        assert_eq!(ese.into_iter().collect::<Vec<_>>(), vec![c0]);
        assert_eq!(center(&s), vec![id]);
    }

    #[test]
    fn semilattice_order_is_meet_order() {
        // subsets of {0,1} under intersection; element i is the bitmask i
        let s = FiniteSemigroup::from_cayley((0..4).map(|a| (0..4).map(|b| a & b).collect()).collect()).unwrap();
        let order = idempotent_order(&s);
        for a in 0..4usize {
            for b in 0..4usize {
                assert_eq!(order.contains(&(a, b)), a & b == a);
            }
        }
        assert_eq!(minimal_idempotents(&s), vec![0]);
    }

    #[test]
    fn order_is_partial_order() {
        let (s, _) = t2();
        let order: BTreeSet<(usize, usize)> = idempotent_order(&s).into_iter().collect();
        let idem = idempotents(&s);
        for &a in &idem {
            assert!(order.contains(&(a, a)));
            for &b in &idem {
                if a != b {
                    assert!(!(order.contains(&(a, b)) && order.contains(&(b, a))));
                }
                for &c in &idem {
                    if order.contains(&(a, b)) && order.contains(&(b, c)) {
                        assert!(order.contains(&(a, c)));
                    }
                }
            }
        }
        assert_eq!(power_cycle_idempotents(&s), idem);
    }
}
