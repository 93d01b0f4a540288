use serde::{Deserialize, Serialize};

use super::matrix::{Matrix, C64};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Square complex matrix acting on `ℂⁿ`, with the numerical tolerance all
/// downstream certificates scale from.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    matrix: Matrix,
    tol: f64,
}

impl OperatorMatrix {
    pub fn new(matrix: Matrix, tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidMatrix(format!("{}x{} is not square", matrix.rows(), matrix.cols())));
        }
        if matrix.rows() == 0 {
            return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
        }
        if !matrix.is_finite() {
            return Err(Error::InvalidMatrix("entries must be finite".into()));
        }
        if !(tol > 0.0 && tol < 1e-2) {
            return Err(Error::InvalidMatrix(format!("tolerance {tol} outside (0, 1e-2)")));
        }
        Ok(Self { matrix, tol })
    }

    pub fn with_default_tol(matrix: Matrix) -> Result<Self> {
        Self::new(matrix, DEFAULT_TOL)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != c) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        Self::with_default_tol(Matrix::from_real_rows(rows))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    /// Entrywise real and nonnegative within `tol`.
    pub fn is_nonnegative(&self, tol: f64) -> bool {
        self.matrix.min_real() >= -tol && self.matrix.max_imag() <= tol
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from_matrix(&self.matrix)
    }
}

/// Complex entry in the interchange format; plain numbers are read as reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl EntryJson {
    fn value(self) -> C64 {
        match self {
            EntryJson::Real(x) => C64::new(x, 0.0),
            EntryJson::Complex { re, im } => C64::new(re, im),
        }
    }
}

/// `{"dim": n, "entries": [[…], …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<EntryJson>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &Matrix) -> Self {
        let real = m.max_imag() == 0.0;
        let entries = (0..m.rows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .map(|z| if real { EntryJson::Real(z.re) } else { EntryJson::Complex { re: z.re, im: z.im } })
                    .collect()
            })
            .collect();
        Self { dim: m.rows(), entries }
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        if self.entries.len() != self.dim || self.entries.iter().any(|r| r.len() != self.dim) {
            return Err(Error::InvalidMatrix(format!("entries do not form a {0}x{0} array", self.dim)));
        }
        Ok(Matrix::from_fn(self.dim, self.dim, |i, j| self.entries[i][j].value()))
    }
}

pub fn parse_matrix_json(text: &str, tol: f64) -> Result<OperatorMatrix> {
    let parsed: MatrixJson =
        serde_json::from_str(text).map_err(|e| Error::InvalidMatrix(format!("json: {e}")))?;
    OperatorMatrix::new(parsed.to_matrix()?, tol)
}

/// Real matrix, one row per line, comma separated. Blank lines are skipped.
pub fn parse_matrix_csv(text: &str, tol: f64) -> Result<OperatorMatrix> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidMatrix(format!("line {}: {e}", lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidMatrix("csv matrix is not square".into()));
    }
    OperatorMatrix::new(Matrix::from_real_rows(&rows), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_accepts_real_and_complex_entries() {
        let m = parse_matrix_json(r#"{"dim":2,"entries":[[1, {"re":0,"im":1}],[0.5, 0]]}"#, 1e-9).unwrap();
        assert_eq!(m.matrix()[(0, 1)], C64::new(0.0, 1.0));
        assert_eq!(m.matrix()[(1, 0)], C64::new(0.5, 0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(parse_matrix_json(r#"{"dim":2,"entries":[[1,2]]}"#, 1e-9).is_err());
        assert!(parse_matrix_csv("1,2\n3\n", 1e-9).is_err());
        assert!(OperatorMatrix::new(Matrix::identity(2), 0.1).is_err());
        assert!(OperatorMatrix::new(Matrix::identity(2), 0.0).is_err());
        let mut nan = Matrix::identity(2);
        nan[(0, 0)] = C64::new(f64::NAN, 0.0);
        assert!(OperatorMatrix::with_default_tol(nan).is_err());
        assert!(OperatorMatrix::with_default_tol(Matrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn csv_round() {
        let m = parse_matrix_csv("0, 1\n1, 0\n", 1e-9).unwrap();
        assert_eq!(m.dim(), 2);
        let back = m.to_json().to_matrix().unwrap();
        assert_eq!(&back, m.matrix());
    }
}
