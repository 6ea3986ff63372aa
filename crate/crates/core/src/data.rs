use crate::error::{Result, RpdcError};

/// An `n x d` real matrix stored row-major, one observation per row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DataMatrix {
    /// Builds a matrix from row-major storage. Entries must be finite.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if cols == 0 {
            return Err(RpdcError::InvalidParameter("matrix must have at least one column".into()));
        }
        if data.len() != rows * cols {
            return Err(RpdcError::LengthMismatch { left: data.len(), right: rows * cols });
        }
        check_finite(&data)?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(RpdcError::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(rows.len(), cols, data)
    }

    /// A single-column matrix.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::from_row_major(values.len(), 1, values.to_vec())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    /// Returns a copy with rows reordered so that row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        debug_assert_eq!(perm.len(), self.rows);
        let mut data = Vec::with_capacity(self.data.len());
        for &p in perm {
            data.extend_from_slice(self.row(p));
        }
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Rows `start..end` as a new matrix.
    pub fn slice_rows(&self, start: usize, end: usize) -> Self {
        Self {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }

    /// Applies `f` entrywise. The result must stay finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_row_major(self.rows, self.cols, self.data.iter().map(|&v| f(v)).collect())
    }
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(RpdcError::NonFinite { index }),
        None => Ok(()),
    }
}

pub(crate) fn check_paired(x: &DataMatrix, y: &DataMatrix, min_n: usize) -> Result<usize> {
    if x.nrows() != y.nrows() {
        return Err(RpdcError::LengthMismatch { left: x.nrows(), right: y.nrows() });
    }
    if x.nrows() < min_n {
        return Err(RpdcError::SampleSize { got: x.nrows(), min: min_n });
    }
    Ok(x.nrows())
}

/// A matched pair of samples sharing the observation index.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    pub x: DataMatrix,
    pub y: DataMatrix,
}

impl PairedSample {
    pub fn new(x: DataMatrix, y: DataMatrix) -> Result<Self> {
        check_paired(&x, &y, 1)?;
        Ok(Self { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }
}
