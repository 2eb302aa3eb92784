use std::ops::Index;

use crate::error::{Error, Result};

use super::scalar::Scalar;

/// A row vector.
#[derive(Clone, Debug, PartialEq)]
pub struct RowVector<T> {
    entries: Vec<T>,
}

impl<T: Scalar> RowVector<T> {
    pub fn new(entries: Vec<T>) -> Self {
        RowVector { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        RowVector {
            entries: vec![T::zero(); dim],
        }
    }

    /// The point mass on coordinate `i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[i] = T::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<T> {
        self.entries
    }

    pub fn sum(&self) -> T {
        self.entries.iter().fold(T::zero(), |acc, x| acc + x.clone())
    }

    pub fn dot(&self, other: &RowVector<T>) -> Result<T> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .filter(|(a, _)| !a.is_zero())
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    pub fn scale(&self, c: &T) -> RowVector<T> {
        RowVector::new(self.entries.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn add(&self, other: &RowVector<T>) -> Result<RowVector<T>> {
        check_dim(self.dim(), other.dim())?;
        Ok(RowVector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        ))
    }

    /// `self · m`, skipping zero coordinates of `self`.
    pub fn mul_matrix(&self, m: &Matrix<T>) -> Result<RowVector<T>> {
        check_dim(m.rows(), self.dim())?;
        let mut out = vec![T::zero(); m.cols()];
        for (i, vi) in self.entries.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, mij) in m.row(i).iter().enumerate() {
                if !mij.is_zero() {
                    out[j] = out[j].clone() + vi.clone() * mij.clone();
                }
            }
        }
        Ok(RowVector::new(out))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> RowVector<U> {
        RowVector::new(self.entries.iter().map(f).collect())
    }
}

impl<T> Index<usize> for RowVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.entries[i]
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            check_dim(c, row.len())?;
            data.extend(row);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vector(&self, i: usize) -> RowVector<T> {
        RowVector::new(self.row(i).to_vec())
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut t: Matrix<T> = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        check_dim(self.cols, other.rows)?;
        let mut out: Matrix<T> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j).clone();
                        out.set(i, j, cur + a.clone() * b.clone());
                    }
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix<T>) -> Matrix<T> {
        let mut out = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if !b.is_zero() {
                            out.set(i * other.rows + k, j * other.cols + l, a.clone() * b.clone());
                        }
                    }
                }
            }
        }
        out
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }
}

/// Square matrix with entries in [0,1] and every row summing to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix<T>(Matrix<T>);

impl<T: Scalar> StochasticMatrix<T> {
    pub fn new(m: Matrix<T>) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        for i in 0..m.rows() {
            let mut sum = T::zero();
            for (j, x) in m.row(i).iter().enumerate() {
                if *x < T::zero() && !x.is_negligible() || *x > T::one() && !x.near(&T::one()) {
                    return Err(Error::NotStochastic(format!("entry ({i},{j}) = {x}")));
                }
                sum = sum + x.clone();
            }
            if !sum.near(&T::one()) {
                return Err(Error::NotStochastic(format!("row {i} sums to {sum}")));
            }
        }
        Ok(StochasticMatrix(m))
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        StochasticMatrix(Matrix::identity(n))
    }

    /// Deterministic matrix sending state `i` to `targets[i]`.
    pub fn from_map(targets: &[usize]) -> Self {
        let n = targets.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &t) in targets.iter().enumerate() {
            m.set(i, t, T::one());
        }
        StochasticMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        self.0.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.0.row(i)
    }

    /// Exact product; re-validates stochasticity of the result.
    pub fn mul(&self, other: &StochasticMatrix<T>) -> Result<StochasticMatrix<T>> {
        StochasticMatrix::new(self.0.mul(&other.0)?)
    }

    pub fn kron(&self, other: &StochasticMatrix<T>) -> StochasticMatrix<T> {
        StochasticMatrix(self.0.kron(&other.0))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> StochasticMatrix<U> {
        StochasticMatrix(self.0.map(f))
    }
}

/// Free-function form of the stochastic product.
pub fn mat_mul<T: Scalar>(
    a: &StochasticMatrix<T>,
    b: &StochasticMatrix<T>,
) -> Result<StochasticMatrix<T>> {
    a.mul(b)
}
