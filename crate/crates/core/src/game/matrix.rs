use crate::error::{Error, Result};
use crate::real::Real;
use crate::rng;

/// Dense row-major payoff matrix `A` with `rows = m` (player II actions)
/// and `cols = n` (player I actions).
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffMatrix<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl PayoffMatrix<f64> {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::invalid(format!(
                "ragged payoff matrix: row {} has {} entries, expected {n}",
                i + 1,
                r.len()
            )));
        }
        Self::from_row_major(m, n, rows.into_iter().flatten().collect())
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("payoff matrix must be at least 1x1"));
        }
        if data.len() != rows * cols {
            return Err(Error::dims("payoff entries", rows * cols, data.len()));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite payoff at row {}, column {}",
                k / cols + 1,
                k % cols + 1
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_row_major(rows, cols, vec![0.0; rows * cols])
    }

    pub fn matching_pennies() -> Self {
        Self {
            rows: 2,
            cols: 2,
            data: vec![1.0, -1.0, -1.0, 1.0],
        }
    }

    /// Entries i.i.d. uniform on `[-1, 1]`, drawn row-major from the seeded
    /// generator in [`crate::rng`].
    pub fn random(rows: usize, cols: usize, seed: u64) -> Result<Self> {
        let mut g = rng::seeded(seed);
        let data = (0..rows * cols)
            .map(|_| 2.0 * rng::uniform01(&mut g) - 1.0)
            .collect();
        Self::from_row_major(rows, cols, data)
    }

    pub fn to_precision<U: Real>(&self) -> PayoffMatrix<U> {
        PayoffMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| U::from_f64(v)).collect(),
        }
    }

    /// Rows as owned vectors.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    /// `f(A)` entry-wise; used for scaling and shifting instances.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_row_major(
            self.rows,
            self.cols,
            self.data.iter().map(|&v| f(v)).collect(),
        )
    }
}

impl<T: Real> PayoffMatrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    /// `A x` for `x` of length `cols`.
    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::dims("A x", self.cols, x.len()));
        }
        Ok(self
            .data
            .chunks(self.cols)
            .map(|row| crate::real::dot(row, x))
            .collect())
    }

    /// `Aᵀ y` for `y` of length `rows`.
    pub fn apply_transpose(&self, y: &[T]) -> Result<Vec<T>> {
        if y.len() != self.rows {
            return Err(Error::dims("Aᵀ y", self.rows, y.len()));
        }
        let mut out = vec![T::zero(); self.cols];
        for (row, yi) in self.data.chunks(self.cols).zip(y) {
            for (o, a) in out.iter_mut().zip(row) {
                o.mul_add_assign(a, yi);
            }
        }
        Ok(out)
    }

    /// `‖A‖_{1→∞}`, the largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }
}
