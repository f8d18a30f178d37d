//! JSON matrix files: a dims header plus row-major `[re, im]` pairs.
//!
//! ```json
//! {"format": "osc-matrix", "version": 1, "rows": 2, "cols": 2,
//!  "data": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}
//! ```

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub const FORMAT: &str = "osc-matrix";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub format: String,
    pub version: u32,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let data = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
            .collect();
        MatrixFile { format: FORMAT.into(), version: VERSION, rows: m.nrows(), cols: m.ncols(), data }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.format != FORMAT {
            return Err(Error::MatrixFormat(format!("unknown format tag {:?}", self.format)));
        }
        if self.version != VERSION {
            return Err(Error::MatrixFormat(format!("unsupported version {}", self.version)));
        }
        if self.data.len() != self.rows * self.cols {
            return Err(Error::MatrixFormat(format!(
                "{} entries for a {}x{} matrix",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(CMatrix::from_row_iterator(
            self.rows,
            self.cols,
            self.data.iter().map(|[re, im]| Complex64::new(*re, *im)),
        ))
    }
}

pub fn to_json(m: &CMatrix) -> Result<String> {
    Ok(serde_json::to_string(&MatrixFile::from_matrix(m))?)
}

pub fn from_json(s: &str) -> Result<CMatrix> {
    serde_json::from_str::<MatrixFile>(s)?.to_matrix()
}

pub fn write_matrix(path: &Path, m: &CMatrix) -> Result<()> {
    fs::write(path, to_json(m)?)?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<CMatrix> {
    from_json(&fs::read_to_string(path)?)
}
