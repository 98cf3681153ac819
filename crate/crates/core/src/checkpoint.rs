//! JSON tensor encoding shared by model and prompt checkpoints.

use std::fs;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::DenseMatrix;

pub const FORMAT_VERSION: u32 = 1;

/// A matrix as `{"shape": [rows, cols], "data": [[...], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorJson {
    pub shape: [usize; 2],
    pub data: Vec<Vec<f64>>,
}

impl From<&DenseMatrix> for TensorJson {
    fn from(m: &DenseMatrix) -> Self {
        Self { shape: [m.rows(), m.cols()], data: (0..m.rows()).map(|r| m.row(r).to_vec()).collect() }
    }
}

impl TensorJson {
    pub fn to_matrix(&self, name: &str) -> Result<DenseMatrix> {
        let [rows, cols] = self.shape;
        if self.data.len() != rows || self.data.iter().any(|r| r.len() != cols) {
            return Err(Error::Checkpoint(format!(
                "tensor {name}: data does not match declared shape [{rows}, {cols}]"
            )));
        }
        if rows == 0 {
            return Ok(DenseMatrix::zeros(0, cols));
        }
        DenseMatrix::from_rows(&self.data)
    }
}

pub fn check_version(found: u32) -> Result<()> {
    if found != FORMAT_VERSION {
        return Err(Error::Checkpoint(format!(
            "format_version {found} unsupported (expected {FORMAT_VERSION})"
        )));
    }
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))
}
