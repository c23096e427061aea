//! Dense row-major matrices over exact scalars, plus the plain-text matrix
//! format (one row per line, whitespace-separated entries).

use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fixedpoint::{parse_rational, truncate, ExactRational, Precision, TruncatedValue};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_vec(n, m, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<U>(&self, f: impl FnMut(&T) -> Result<U>) -> Result<Matrix<U>> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }
}

impl<T: Clone> Matrix<T> {
    /// Columns `[start, end)` as a new matrix.
    pub fn col_block(&self, start: usize, end: usize) -> Matrix<T> {
        Matrix::from_fn(self.rows, end - start, |r, c| self[(r, start + c)].clone())
    }

    /// Rows `[start, end)` as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> Matrix<T> {
        Matrix::from_fn(end - start, self.cols, |r, c| self[(start + r, c)].clone())
    }

    pub fn transpose(&self) -> Matrix<T> {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn hconcat(blocks: &[Matrix<T>]) -> Result<Matrix<T>> {
        let rows = blocks.first().map_or(0, Matrix::rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::Dimension("hconcat row counts differ".into()));
        }
        let cols: usize = blocks.iter().map(Matrix::cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(r));
            }
        }
        Matrix::from_vec(rows, cols, data)
    }

    pub fn vconcat(blocks: &[Matrix<T>]) -> Result<Matrix<T>> {
        let cols = blocks.first().map_or(0, Matrix::cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::Dimension("vconcat column counts differ".into()));
        }
        let rows = blocks.iter().map(Matrix::rows).sum();
        let data = blocks.iter().flat_map(|b| b.data.iter().cloned()).collect();
        Matrix::from_vec(rows, cols, data)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            if r > 0 {
                writeln!(f)?;
            }
            let line: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            write!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

pub type RationalMatrix = Matrix<ExactRational>;

impl Matrix<ExactRational> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| ExactRational::zero())
    }

    pub fn from_integers(rows: usize, cols: usize, values: &[i64]) -> Result<Self> {
        Matrix::from_vec(
            rows,
            cols,
            values
                .iter()
                .map(|&v| ExactRational::from_integer(v.into()))
                .collect(),
        )
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, other.cols, |r, c| {
            (0..self.cols).fold(ExactRational::zero(), |acc, k| {
                acc + &self[(r, k)] * &other[(k, c)]
            })
        }))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension("matrix sum shape mismatch".into()));
        }
        Ok(Matrix::from_fn(self.rows, self.cols, |r, c| {
            &self[(r, c)] + &other[(r, c)]
        }))
    }

    pub fn scale(&self, k: &ExactRational) -> Self {
        self.map(|x| x * k)
    }

    /// Entrywise truncation to a digit budget (identity for `Precision::Exact`).
    pub fn truncated(&self, precision: Precision, base: u32) -> Result<Matrix<TruncatedValue>> {
        match precision {
            Precision::Digits(g) => self.try_map(|x| truncate(x, g, base)),
            Precision::Exact => Err(Error::InvalidParameter(
                "exact precision has no fixed-point form".into(),
            )),
        }
    }

    /// Parse plain-text rows of exact literals (`0.25`, `1/3`, `1e-4`).
    /// Blank lines and `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let rows: Vec<Vec<ExactRational>> = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(parse_rational)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        if rows.is_empty() {
            return Err(Error::Parse("empty matrix".into()));
        }
        Matrix::from_rows(rows)
    }
}

impl Matrix<TruncatedValue> {
    pub fn values(&self) -> RationalMatrix {
        self.map(TruncatedValue::value)
    }
}
