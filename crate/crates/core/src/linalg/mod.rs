//! Dense complex linear algebra: matrices, LU/SVD, Schur, eigen data and
//! invariant-subspace splitting.

pub mod dense;
pub mod eigen;
pub mod matrix;
pub mod operator;
pub mod power;
pub mod schur;
pub mod split;

pub use dense::{inverse, norm2, null_space, orthonormalize, rank, subspace_distance, svd, Svd};
pub use eigen::{eigen_decompose, is_power_bounded, EigenDecomposition, Eigenspace, PowerBoundReport, Spectrum};
pub use matrix::{Matrix, C64};
pub use operator::{parse_matrix_csv, parse_matrix_json, MatrixJson, OperatorMatrix, DEFAULT_TOL};
pub use split::{invariant_split, InvariantSplit, SubspaceBasis};
