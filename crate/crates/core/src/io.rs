//! JSON interchange.
//!
//! Matrices: `{"rows": r, "cols": c, "re": [...], "im": [...]}`, row-major.
//! Frames: `{"d": d, "a": [...], "vectors": [matrix, ...]}` with each vector a
//! `d x 1` matrix. Complex numbers are always parallel `re`/`im` arrays.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::FrameSequence;
use crate::linalg::{CVector, GeneralMatrix, HermitianMatrix, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&GeneralMatrix> for MatrixJson {
    fn from(m: &GeneralMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                re.push(m[(r, c)].re);
                im.push(m[(r, c)].im);
            }
        }
        MatrixJson { rows, cols, re, im }
    }
}

impl TryFrom<&MatrixJson> for GeneralMatrix {
    type Error = Error;
    fn try_from(j: &MatrixJson) -> Result<Self> {
        let n = j.rows * j.cols;
        for (field, len) in [("re", j.re.len()), ("im", j.im.len())] {
            if len != n {
                return Err(Error::Parse(format!(
                    "field `{field}` has {len} entries, expected rows*cols = {n}"
                )));
            }
        }
        if j.re.iter().chain(&j.im).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(GeneralMatrix::from_fn(j.rows, j.cols, |r, c| {
            let k = r * j.cols + c;
            C64::new(j.re[k], j.im[k])
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameJson {
    pub d: usize,
    pub a: Vec<f64>,
    pub vectors: Vec<MatrixJson>,
}

impl From<&FrameSequence> for FrameJson {
    fn from(f: &FrameSequence) -> Self {
        FrameJson {
            d: f.dim(),
            a: f.norms().to_vec(),
            vectors: f.vectors().iter().map(|v| MatrixJson::from(&GeneralMatrix::from_column_slice(v.len(), 1, v.as_slice()))).collect(),
        }
    }
}

impl TryFrom<&FrameJson> for FrameSequence {
    type Error = Error;
    fn try_from(j: &FrameJson) -> Result<Self> {
        let mut vectors = Vec::with_capacity(j.vectors.len());
        for (i, m) in j.vectors.iter().enumerate() {
            if m.cols != 1 || m.rows != j.d {
                return Err(Error::Parse(format!(
                    "vectors[{i}] is {}x{}, expected {}x1",
                    m.rows, m.cols, j.d
                )));
            }
            let g = GeneralMatrix::try_from(m)?;
            vectors.push(CVector::from_column_slice(g.as_slice()));
        }
        FrameSequence::new(vectors, j.a.clone())
    }
}

fn parse_err(what: &str, e: serde_json::Error) -> Error {
    Error::Parse(format!("{what}: {e}"))
}

pub fn matrix_from_json(s: &str) -> Result<GeneralMatrix> {
    let j: MatrixJson = serde_json::from_str(s).map_err(|e| parse_err("matrix", e))?;
    GeneralMatrix::try_from(&j)
}

pub fn matrix_to_json(m: &GeneralMatrix) -> String {
    serde_json::to_string(&MatrixJson::from(m)).expect("matrix serializes")
}

pub fn hermitian_from_json(s: &str) -> Result<HermitianMatrix> {
    HermitianMatrix::new(matrix_from_json(s)?)
}

pub fn frame_from_json(s: &str) -> Result<FrameSequence> {
    let j: FrameJson = serde_json::from_str(s).map_err(|e| parse_err("frame", e))?;
    FrameSequence::try_from(&j)
}

pub fn frame_to_json(f: &FrameSequence) -> String {
    serde_json::to_string(&FrameJson::from(f)).expect("frame serializes")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_matrix(path: &Path) -> Result<GeneralMatrix> {
    matrix_from_json(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_hermitian(path: &Path) -> Result<HermitianMatrix> {
    HermitianMatrix::new(read_matrix(path)?)
}

pub fn read_frame(path: &Path) -> Result<FrameSequence> {
    frame_from_json(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// A real vector: either a JSON array or a comma-separated list.
pub fn parse_real_vector(s: &str) -> Result<Vec<f64>> {
    let t = s.trim();
    if t.starts_with('[') {
        return serde_json::from_str(t).map_err(|e| parse_err("vector", e));
    }
    t.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{x}`"))))
        .collect()
}
