//! The matrix document shared by every command:
//!
//! ```json
//! {"dim": 2, "rows": [[[0, 0], [0, 0]], [[3, 0], [0, 0]]]}
//! ```
//!
//! `rows` holds `dim` rows of `dim` `[re, im]` pairs.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDocument {
    dim: usize,
    rows: Vec<Vec<[f64; 2]>>,
}

pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    let doc: MatrixDocument =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.rows.len() != doc.dim {
        return Err(Error::Parse(format!(
            "dim is {} but {} rows were given",
            doc.dim,
            doc.rows.len()
        )));
    }
    let rows: Vec<Vec<Complex64>> = doc
        .rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
}

pub fn matrix_to_json(a: &ComplexMatrix) -> String {
    let doc = MatrixDocument {
        dim: a.dim(),
        rows: a
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    };
    serde_json::to_string(&doc).expect("matrix document serializes")
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path)?;
    matrix_from_json(&text)
}

pub fn write_matrix_file(path: impl AsRef<Path>, a: &ComplexMatrix) -> Result<()> {
    fs::write(path, matrix_to_json(a))?;
    Ok(())
}
