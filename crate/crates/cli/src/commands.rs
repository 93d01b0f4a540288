use std::fs;
use std::path::Path;

use koehler_core::battery::{run_battery, BatteryConfig, INVERSE_HORIZON};
use koehler_core::fixtures::{build, spec_by_name, CATALOG};
use koehler_core::ip::find_fs_sequence_with;
use koehler_core::jdlg::{
    decompose, decomposition_distance, verify_invariance, verify_rev_recurrence, verify_stability, verify_structure,
    verify_unimodular_eigenvectors, Decomposition,
};
use koehler_core::koehler::{
    commutation_report, inverse_on_rev, minimal_idempotent_dynamical_with, minimal_idempotent_spectral, orbit_closure_with,
    ProjectionMatrix, DEFAULT_NET_CAP,
};
use koehler_core::lattice::{cyclicity_report, peripheral_spectrum_default};
use koehler_core::linalg::{eigen_decompose, is_power_bounded, parse_matrix_csv, parse_matrix_json, OperatorMatrix};
use koehler_core::parallel::Execution;
use koehler_core::report::CheckBlock;
use koehler_core::semigroup::{
    center, idempotent_order, idempotents, minidem_correspondence, minimal_idempotents, minimal_ideals, parse_generators,
    rees_checks,
};
use koehler_core::{Error, Result};
use serde_json::json;

use crate::args::{Global, Method};

pub struct Outcome {
    pub analysis: &'static str,
    pub input: Vec<u8>,
    pub result: serde_json::Value,
    pub blocks: Vec<CheckBlock>,
}

pub fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn exec(g: &Global) -> Execution {
    if g.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    }
}

fn load_matrix(path: &Path, tol: f64) -> Result<(Vec<u8>, OperatorMatrix)> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::InvalidInput("input is not UTF-8".into()))?;
    let op = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        parse_matrix_csv(&text, tol)?
    } else {
        parse_matrix_json(&text, tol)?
    };
    Ok((bytes, op))
}

fn decomposition_blocks(op: &OperatorMatrix, d: &Decomposition, g: &Global, bound: f64, tag: &str) -> Result<Vec<CheckBlock>> {
    let closure = orbit_closure_with(op, g.horizon, g.epsilon, DEFAULT_NET_CAP, exec(g))?;
    let mut blocks = vec![
        verify_structure(d, bound),
        verify_invariance(d, op, Some(&closure)),
        verify_unimodular_eigenvectors(d, op)?,
        verify_stability(d, op, g.horizon.max(1000), 0)?,
        verify_rev_recurrence(d, op, g.epsilon, g.horizon)?,
        commutation_report(&closure),
    ];
    for b in &mut blocks {
        b.name = format!("{tag}.{}", b.name);
    }
    Ok(blocks)
}

fn projection_json(p: &ProjectionMatrix, d: &Decomposition) -> serde_json::Value {
    json!({
        "rev_dim": d.rev_dim(),
        "aws_dim": d.aws_dim(),
        "idempotency_residual": p.idempotency_residual,
        "commutation_residual": p.commutation_residual,
        "witness": p.witness,
        "projection": koehler_core::linalg::MatrixJson::from_matrix(&p.p),
    })
}

pub fn decompose_cmd(path: &Path, method: Method, g: &Global) -> Result<Outcome> {
    let (input, op) = load_matrix(path, g.tol)?;
    let bound = is_power_bounded(&op)?;
    if !bound.power_bounded {
        return Err(Error::NotPowerBounded { spectral_radius: bound.spectral_radius });
    }
    let mut result = serde_json::Map::new();
    result.insert("dim".into(), json!(op.dim()));
    result.insert("power_bound".into(), json!(bound));
    let mut blocks = Vec::new();
    let mut decs = Vec::new();
    if matches!(method, Method::Spectral | Method::Both) {
        let p = minimal_idempotent_spectral(&op)?;
        let d = decompose(&op, &p)?;
        blocks.extend(decomposition_blocks(&op, &d, g, bound.bound_estimate, "spectral")?);
        result.insert("spectral".into(), projection_json(&p, &d));
        decs.push(d);
    }
    if matches!(method, Method::Dynamical | Method::Both) {
        let p = minimal_idempotent_dynamical_with(&op, g.horizon, exec(g))?;
        let d = decompose(&op, &p)?;
        blocks.extend(decomposition_blocks(&op, &d, g, bound.bound_estimate, "dynamical")?);
        result.insert("dynamical".into(), projection_json(&p, &d));
        decs.push(d);
    }
    if let [a, b] = &decs[..] {
        blocks.push(
            CheckBlock::new("methods.agreement")
                .residual("projection_distance", a.p().dist(b.p()), 1e-6 * op.dim() as f64)
                .residual("subspace_distance", decomposition_distance(a, b), 1e-6),
        );
    }
    let inv = inverse_on_rev(&op, &decs[0].projection, INVERSE_HORIZON.max(g.horizon))?;
    result.insert("inverse_on_rev".into(), json!(inv));
    blocks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(Outcome { analysis: "decompose", input, result: serde_json::Value::Object(result), blocks })
}

pub fn cyclicity_cmd(path: &Path, k_max: Option<usize>, g: &Global) -> Result<Outcome> {
    let (input, op) = load_matrix(path, g.tol)?;
    let ps = peripheral_spectrum_default(&op)?;
    let block = cyclicity_report(&op, k_max)?;
    let eig = eigen_decompose(&op)?;
    let result = json!({ "peripheral": ps, "spectrum": eig.spectrum });
    Ok(Outcome { analysis: "cyclicity", input, result, blocks: vec![block] })
}

pub fn semigroup_cmd(path: &Path, cap: usize, g: &Global) -> Result<Outcome> {
    let input = read(path)?;
    let text = String::from_utf8(input.clone()).map_err(|_| Error::InvalidInput("input is not UTF-8".into()))?;
    let s = parse_generators(&text, g.epsilon, cap)?;
    let (left, right) = minimal_ideals(&s);
    let mut blocks = vec![rees_checks(&s)];
    match minidem_correspondence(&s) {
        Ok(b) => blocks.push(b),
        Err(Error::Unsupported(msg)) => blocks.push(CheckBlock::skipped("semigroup.minidem_correspondence", msg)),
        Err(e) => return Err(e),
    }
    let result = json!({
        "size": s.size(),
        "cayley": s.to_json().cayley,
        "words": s.words(),
        "idempotents": idempotents(&s),
        "minimal_idempotents": minimal_idempotents(&s),
        "idempotent_order": idempotent_order(&s),
        "left_ideals": left,
        "right_ideals": right,
        "center": center(&s),
    });
    Ok(Outcome { analysis: "semigroup", input, result, blocks })
}

pub fn ipsearch_cmd(path: &Path, length: usize, g: &Global) -> Result<Outcome> {
    let input = read(path)?;
    let set: std::collections::BTreeSet<u64> =
        serde_json::from_slice(&input).map_err(|e| Error::InvalidInput(format!("set JSON: {e}")))?;
    let bound = set.iter().next_back().copied().unwrap_or(1);
    let witness = find_fs_sequence_with(&set, length, bound, exec(g))?;
    let block = CheckBlock::new("ip.search").certificates(json!({ "found": witness.is_some() }));
    Ok(Outcome { analysis: "ipsearch", input, result: json!({ "witness": witness }), blocks: vec![block] })
}

pub fn fixtures_cmd(list: bool, emit: Option<&[String]>) -> Result<Outcome> {
    match (list, emit) {
        (_, Some([name, seed])) => {
            let seed: u64 = seed.parse().map_err(|_| Error::InvalidInput(format!("seed {seed:?} is not an integer")))?;
            let f = build(&spec_by_name(name, seed)?)?;
            let input = format!("{name}:{seed}").into_bytes();
            Ok(Outcome { analysis: "fixtures", input, result: json!(f.record()), blocks: Vec::new() })
        }
        (true, None) => Ok(Outcome { analysis: "fixtures", input: Vec::new(), result: json!({ "fixtures": CATALOG }), blocks: Vec::new() }),
        _ => Err(Error::InvalidInput("fixtures needs --list or --emit NAME SEED".into())),
    }
}

pub fn battery_cmd(seed: u64, count: usize, g: &Global) -> Result<Outcome> {
    let mut cfg = BatteryConfig::new(seed, count);
    cfg.exec = exec(g);
    let blocks = run_battery(&cfg);
    let input = format!("seed={seed};count={count}").into_bytes();
    let result = json!({ "seed": seed, "count": count, "cyclicity_count": cfg.cyclicity_count });
    Ok(Outcome { analysis: "battery", input, result, blocks })
}
