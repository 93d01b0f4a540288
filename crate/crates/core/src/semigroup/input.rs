//! JSON generator sets for the semigroup engine.

use serde::Deserialize;

use super::{from_bool_matrices, from_matrices, from_transformations, BoolMatrix, CayleyJson, FiniteSemigroup, Transformation};
use crate::error::{Error, Result};
use crate::linalg::MatrixJson;

/// `{"kind": "transformations", "generators": [[1,0],[0,0]]}`, likewise
/// `"boolean"` (0/1 rows) and `"matrices"` (matrix JSON objects), or a bare
/// Cayley table `{"size": m, "cayley": [...]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GeneratorInput {
    Tagged(Tagged),
    Cayley(CayleyJson),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", content = "generators", rename_all = "lowercase")]
pub enum Tagged {
    Transformations(Vec<Vec<usize>>),
    Boolean(Vec<Vec<Vec<u8>>>),
    Matrices(Vec<MatrixJson>),
}

pub fn parse_generators(text: &str, epsilon: f64, cap: usize) -> Result<FiniteSemigroup> {
    let input: GeneratorInput =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("generator JSON: {e}")))?;
    match input {
        GeneratorInput::Cayley(c) => FiniteSemigroup::from_json(&c),
        GeneratorInput::Tagged(Tagged::Transformations(g)) => {
            let gens = g.into_iter().map(Transformation::new).collect::<Result<Vec<_>>>()?;
            nonempty(&gens)?;
            from_transformations(&gens, cap)
        }
        GeneratorInput::Tagged(Tagged::Boolean(g)) => {
            let gens = g
                .into_iter()
                .map(|m| BoolMatrix::new(m.into_iter().map(|r| r.into_iter().map(|x| x != 0).collect()).collect()))
                .collect::<Result<Vec<_>>>()?;
            nonempty(&gens)?;
            from_bool_matrices(&gens, cap)
        }
        GeneratorInput::Tagged(Tagged::Matrices(g)) => {
            let gens = g.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
            nonempty(&gens)?;
            from_matrices(&gens, epsilon, cap)
        }
    }
}

fn nonempty<T>(v: &[T]) -> Result<()> {
    if v.is_empty() {
        Err(Error::InvalidInput("no generators".into()))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let s = parse_generators(r#"{"kind":"transformations","generators":[[1,0],[0,0]]}"#, 1e-9, 100).unwrap();
        assert_eq!(s.size(), 4);
        let s = parse_generators(r#"{"kind":"boolean","generators":[[[0,1],[0,0]]]}"#, 1e-9, 100).unwrap();
        assert_eq!(s.size(), 2);
        let s = parse_generators(r#"{"kind":"matrices","generators":[{"dim":1,"entries":[[-1.0]]}]}"#, 1e-9, 100).unwrap();
        assert_eq!(s.size(), 2);
        let s = parse_generators(r#"{"size":2,"cayley":[[0,0],[1,1]]}"#, 1e-9, 100).unwrap();
        assert_eq!(s.size(), 2);
        assert!(parse_generators(r#"{"kind":"transformations","generators":[]}"#, 1e-9, 100).is_err());
        assert!(parse_generators("[1,2]", 1e-9, 100).is_err());
    }
}
